#include "tenkontract/cli.hpp"

int main(int argc, char** argv) { return tenkontract::cli::run({argv, argv + argc}); }
