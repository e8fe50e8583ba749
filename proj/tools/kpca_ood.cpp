#include "kpca/cli.hpp"

int main(int argc, char** argv) { return kpca::cli::run(argc, argv); }
