#include "cooptrap/cli.hpp"

int main(int argc, char** argv) { return cooptrap::cli::run(argc, argv); }
