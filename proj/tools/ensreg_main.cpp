#include "ensreg/cli.hpp"

int main(int argc, char** argv) {
    return ensreg::run_cli(argc, argv);
}
