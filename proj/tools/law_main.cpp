#include "law/cli.hpp"

int main(int argc, char** argv) { return law::cli::run(argc, argv); }
