#include "cli.hpp"

int main(int argc, char** argv)
{
    return mreg::cli::run(argc, argv);
}
