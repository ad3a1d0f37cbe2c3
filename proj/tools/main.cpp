#include "commands.hpp"

int main(int argc, char** argv) { return regime_riccati::cli::run(argc, argv); }
