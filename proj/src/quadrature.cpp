#include "gsys/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "gsys/errors.hpp"

namespace gsys {
namespace {

// QUADPACK qk15 nodes/weights on [-1,1].
const double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
                        0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
const double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
                        0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
const double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double result_gauss = fc * kWg[3];
    double result_kronrod = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double fsum = f(c - x) + f(c + x);
        result_kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) result_gauss += kWg[j / 2] * fsum;
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = result_kronrod * h;
    const double diff = std::fabs((result_kronrod - result_gauss) * h);
    p.err = diff;
    return p;
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                    double abs_tol, const std::vector<double>& breakpoints, int max_intervals) {
    if (a == b) return {0.0, 0.0, 0};
    std::vector<double> cuts{a, b};
    for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Panel> heap;
    double total = 0.0, total_err = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        Panel p = evaluate_panel(f, cuts[i], cuts[i + 1]);
        total += p.value;
        total_err += p.err;
        heap.push(p);
    }
    int n = static_cast<int>(heap.size());
    while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
        if (n >= max_intervals) throw QuadratureError("adaptive quadrature did not converge");
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) throw QuadratureError("quadrature interval underflow");
        Panel left = evaluate_panel(f, worst.a, mid);
        Panel right = evaluate_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        ++n;
    }
    return {total, total_err, n};
}

}  // namespace gsys
