#include <cbordns/cli.hpp>

int main(int argc, char** argv)
{
    std::ios::sync_with_stdio(false);
    return cbordns::cli::run(argc, argv, {std::cin, std::cout, std::cerr});
}
