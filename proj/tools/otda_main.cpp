#include "otda/cli.hpp"

int main(int argc, char** argv) { return otda::cli::run(argc, argv); }
