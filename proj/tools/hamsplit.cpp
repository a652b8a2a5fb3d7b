#include "hamsplit/cli.hpp"

int main(int argc, char** argv) {
    try {
        return hamsplit::cli::run(argc, argv, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "hamsplit: " << e.what() << "\n";
        return hamsplit::cli::kExitInput;
    }
}
