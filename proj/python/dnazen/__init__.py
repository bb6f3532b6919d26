"""G-gram enhanced genomic representation learning.

BPE tokenization over DNA, association-scored G-gram extraction and matching,
and a dual-encoder model with whole-G-gram masked pre-training, fine-tuning,
and MCC evaluation. The heavy lifting lives in the compiled `_core` module;
`cli_run` exposes the full command-line pipeline in-process.
"""

import sys

from ._core import (
    CLS_ID,
    MASK_ID,
    NUM_SPECIALS,
    PAD_ID,
    SEP_ID,
    UNK_ID,
    GGramVocab,
    ModelConfig,
    ModelState,
    NumericError,
    TokenVocab,
    TrainConfig,
    ValidationError,
    build_ggram_vocab,
    clean_sequence,
    cli_run,
    decode,
    encode,
    finetune,
    load_ggram_vocab,
    load_model,
    load_token_vocab,
    make_model,
    match_ggrams,
    mcc,
    predict,
    pretrain,
    save_ggram_vocab,
    save_model,
    save_token_vocab,
    train_tokenizer,
)

__all__ = [
    "CLS_ID",
    "MASK_ID",
    "NUM_SPECIALS",
    "PAD_ID",
    "SEP_ID",
    "UNK_ID",
    "GGramVocab",
    "ModelConfig",
    "ModelState",
    "NumericError",
    "TokenVocab",
    "TrainConfig",
    "ValidationError",
    "build_ggram_vocab",
    "clean_sequence",
    "cli_run",
    "decode",
    "encode",
    "finetune",
    "load_ggram_vocab",
    "load_model",
    "load_token_vocab",
    "main",
    "make_model",
    "match_ggrams",
    "mcc",
    "predict",
    "pretrain",
    "save_ggram_vocab",
    "save_model",
    "save_token_vocab",
    "train_tokenizer",
]


def main() -> None:
    """Console entry point: dispatch to the command-line pipeline."""
    raise SystemExit(cli_run(sys.argv[1:]))
