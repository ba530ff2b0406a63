#include "cli.hpp"

int main(int argc, char** argv) { return annimpute::cli::run(argc, argv); }
