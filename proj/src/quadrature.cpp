#include "uasd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace uasd {

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1, 1] with the embedded
// 7-point Gauss rule (standard QUADPACK constants).
constexpr double kXgk[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,
    0.741531185599394,  0.864864423359769,  0.949107912342759,
    0.991455371120813};

constexpr double kWgk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};

constexpr double kWg[7] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469,
                           0.381830050505119, 0.279705391489277,
                           0.129484966168870};

struct Panel {
  double a, b;
  double integral;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evalPanel(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double gk = 0.0, g = 0.0;
  for (int i = 0; i < 15; ++i) {
    double v = f(mid + half * kXgk[i]);
    gk += kWgk[i] * v;
    if (i % 2 == 1) g += kWg[i / 2] * v;
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.integral = gk * half;
  double diff = std::abs(gk - g) * half;
  // QUADPACK-style error sharpening
  p.error = diff;
  return p;
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                const QuadratureOptions& opt,
                std::vector<Panel>* keepPanels = nullptr) {
  std::priority_queue<Panel> heap;
  Panel root = evalPanel(f, a, b);
  heap.push(root);
  double total = root.integral;
  double err = root.error;
  int n = 1;
  std::vector<Panel> done;
  while (err > opt.absTol && err > opt.relTol * std::abs(total) &&
         n < opt.maxIntervals) {
    Panel worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      done.push_back(worst);  // interval exhausted at double resolution
      if (heap.empty()) break;
      continue;
    }
    Panel left = evalPanel(f, worst.a, mid);
    Panel right = evalPanel(f, mid, worst.b);
    total += left.integral + right.integral - worst.integral;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  if (keepPanels) {
    while (!heap.empty()) {
      done.push_back(heap.top());
      heap.pop();
    }
    *keepPanels = std::move(done);
  }
  return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt) {
  if (!(b > a)) return 0.0;
  return adaptive(f, a, b, opt);
}

double integrateToInfinity(const std::function<double(double)>& f, double a,
                           const QuadratureOptions& opt) {
  auto g = [&f, a](double t) {
    double om = 1.0 - t;
    double x = a + t / om;
    return f(x) / (om * om);
  };
  return adaptive(g, 0.0, 1.0, opt);
}

double integrateSqrtEdges(const std::function<double(double)>& f, double a,
                          double b, const QuadratureOptions& opt) {
  if (!(b > a)) return 0.0;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto g = [&](double t) {
    double x = mid + half * std::sin(t);
    return f(x) * half * std::cos(t);
  };
  return adaptive(g, -0.5 * std::numbers::pi, 0.5 * std::numbers::pi, opt);
}

QuadratureRule buildRule(const std::function<double(double)>& driver, double a,
                         double b, const QuadratureOptions& opt) {
  QuadratureRule rule;
  if (!(b > a)) return rule;
  std::vector<Panel> panels;
  adaptive(driver, a, b, opt, &panels);
  for (const Panel& p : panels) {
    const double mid = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    for (int i = 0; i < 15; ++i) {
      rule.nodes.push_back(mid + half * kXgk[i]);
      rule.weights.push_back(kWgk[i] * half);
    }
  }
  return rule;
}

QuadratureRule buildRuleToInfinity(const std::function<double(double)>& driver,
                                   double a, const QuadratureOptions& opt) {
  auto g = [&driver, a](double t) {
    double om = 1.0 - t;
    double x = a + t / om;
    return driver(x) / (om * om);
  };
  QuadratureRule tRule;
  std::vector<Panel> panels;
  adaptive(g, 0.0, 1.0, opt, &panels);
  QuadratureRule rule;
  for (const Panel& p : panels) {
    const double mid = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    for (int i = 0; i < 15; ++i) {
      double t = mid + half * kXgk[i];
      double om = 1.0 - t;
      rule.nodes.push_back(a + t / om);
      rule.weights.push_back(kWgk[i] * half / (om * om));
    }
  }
  return rule;
}

double goldenSectionMax(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  if (!(b > a)) return a;
  const double invPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invPhi * (b - a);
  double x2 = a + invPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invPhi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace uasd
