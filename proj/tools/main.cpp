#include "critchain/commands.hpp"

int main(int argc, char** argv) { return critchain::cli::run(argc, argv); }
