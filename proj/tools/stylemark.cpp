#include "stylemark/cli.hpp"

int main(int argc, char** argv) { return stylemark::cli::run(argc, argv); }
