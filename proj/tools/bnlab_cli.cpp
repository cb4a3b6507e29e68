#include "bnlab/cli_lab.hpp"

int main(int argc, char** argv) { return bnlab::run(argc, argv); }
