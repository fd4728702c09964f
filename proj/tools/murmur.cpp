#include "murmur/cli.hpp"

int main(int argc, char** argv) { return murmur::cli::run(argc, argv); }
