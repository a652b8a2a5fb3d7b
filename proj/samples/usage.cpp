// Splits two separated discs into uneven parts and certifies the result.

#include <iostream>

#include "hamsplit.hpp"

int main() {
    using namespace hamsplit;
    Vec a(2), b(2);
    a << -3.0, 0.0;
    b << 3.0, 0.0;
    Problem p{{Measure::uniform_ball(a, 1.0), Measure::uniform_ball(b, 1.0)}, {0.3, 0.7}, {}};

    SolverConfig config;
    config.certify = true;
    const SplitOutcome out = find_split(p, config);
    if (!out.found()) {
        std::cout << "no split, best scan norm " << out.scan.best_norm << "\n";
        return 2;
    }
    const SplitResult& r = *out.split;
    std::cout << "normal " << r.hyperplane.normal().transpose() << "  offset " << r.hyperplane.offset() << "\n"
              << "masses " << r.achieved[0] << " " << r.achieved[1] << "  residual " << r.residual_norm << "\n"
              << "certified " << (r.certificate && r.certificate->verdict == Verdict::certified) << "\n";
    return 0;
}
