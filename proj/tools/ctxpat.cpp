#include "ctxpat/cli.hpp"

int main(int argc, char** argv) { return ctxpat::cli::run(argc, argv); }
