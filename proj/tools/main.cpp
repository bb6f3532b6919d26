#include "dnazen/cli.hpp"

int main(int argc, char** argv) { return dnazen::cli::run(argc, argv); }
