#include <cstdio>
#include <cmath>
#include <random>
#include <vector>
#include "rcl/potential.hpp"
using namespace rcl;
static Vec v2(double x,double y){Vec v(2);v<<x,y;return v;}
static double worst_violation(const PotentialField& f, double diam, unsigned seed, int segs) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ub(-2*diam, 2*diam), ul(0.0, 1.0);
    double worst = -1;
    for (int k = 0; k < segs; ++k) {
        Vec x = v2(ub(rng), ub(rng)), y = v2(ub(rng), ub(rng));
        double lam = ul(rng);
        double viol = std::min(f.value(x), f.value(y)) - f.value(lam*x+(1-lam)*y);
        worst = std::max(worst, viol);
    }
    return worst;
}
int main(){
    const auto sq = ConvexBody::polytope({v2(-0.5,-0.5),v2(0.5,-0.5),v2(0.5,0.5),v2(-0.5,0.5)});
    const double R = 1.0/std::sqrt(3.0);
    std::vector<Vec> tv;
    for (int k = 0; k < 3; ++k) {
        double th = M_PI/2 + 2*M_PI*k/3;
        tv.push_back(v2(R*std::cos(th), R*std::sin(th)));
    }
    const auto tri = ConvexBody::polytope(tv);
    for (auto [name, body] : {std::pair<const char*, const ConvexBody*>{"square", &sq}, {"triangle", &tri}}) {
        for (int res : {2000, 3000, 4000}) {
            auto cap = capacitary_function(*body, res);
            const double diam = body->diameter();
            int pass = 0; double worst_all = 0;
            for (unsigned seed = 1; seed <= 10; ++seed) {
                double w = worst_violation(cap.field, diam, seed, 10000);
                if (w <= 1e-3) pass++;
                worst_all = std::max(worst_all, w);
            }
            double w12345 = worst_violation(cap.field, diam, 12345u, 10000);
            std::printf("%s res=%d n=%d: pass %d/10 worst=%.5f seed12345=%.5f\n",
                        name, res, cap.field.measure().cloud.size(), pass, worst_all, w12345);
        }
    }
    return 0;
}
