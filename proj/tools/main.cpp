#include "crplab/experiment.hpp"

int main(int argc, char** argv) { return crplab::run_cli(argc, argv); }
