#include "ontolink/cli.hpp"

int main(int argc, char** argv) { return ontolink::run_cli(argc, argv); }
