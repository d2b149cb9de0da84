#include "lntopo/cli.hpp"

int main(int argc, char** argv) { return lntopo::cli::run(argc, argv); }
