#include "cli.hpp"

int main(int argc, char** argv) { return oarpost::cli::run(argc, argv); }
