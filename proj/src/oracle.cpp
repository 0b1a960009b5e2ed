#include "lobosc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "lobosc/errors.hpp"
#include "lobosc/io.hpp"

namespace lobosc::oracle {

TridiagonalOperator assemble_with(const std::function<double(double)>& pfun,
                                  const std::function<double(double)>& Wfun,
                                  double lo, double hi, int N) {
  if (N < 4) throw ConfigError("assemble: need at least 4 cells");
  if (!(hi > lo)) throw ConfigError("assemble: need hi > lo");
  const double h = (hi - lo) / N;
  TridiagonalOperator T;
  T.h = h;
  T.Xi = hi;
  T.m = 0;
  T.diag.resize(N);
  T.offdiag.resize(N - 1);
  // Flux coefficients at the faces lo + j h, j = 0..N.  p(lo) enters the
  // first diagonal entry untouched: when it vanishes there, the regular
  // endpoint selects itself.
  std::vector<double> pf(N + 1);
  for (int j = 0; j <= N; ++j) pf[j] = pfun(lo + j * h);
  const double inv_h2 = 1.0 / (h * h);
  for (int j = 0; j < N; ++j) {
    const double xc = lo + (j + 0.5) * h;
    // Ghost-cell Dirichlet doubling at both ends; at the regular end the
    // face flux p(lo) is zero for the physical operator, so the doubling
    // contributes nothing there.
    const double left = (j == 0) ? 2.0 * pf[0] : pf[j];
    const double right = (j == N - 1) ? 2.0 * pf[N] : pf[j + 1];
    T.diag[j] = (left + right) * inv_h2 + Wfun(xc);
    if (j + 1 < N) T.offdiag[j] = -pf[j + 1] * inv_h2;
  }
  return T;
}

TridiagonalOperator assemble(const geometry::ModelParams& p, int m, double Xi,
                             int N) {
  if (!(Xi > 1.0)) throw ConfigError("assemble: need Xi > 1");
  const double q2 = p.q * p.q;
  const double m2 = static_cast<double>(m) * m;
  auto pfun = [](double xi) { return xi * xi - 1.0; };
  auto Wfun = [q2, m2](double xi) {
    const double s = xi * xi - 1.0;
    double W = q2 * s - 0.25;
    if (m2 != 0.0) W += m2 / s;
    return W;
  };
  TridiagonalOperator T = assemble_with(pfun, Wfun, 1.0, Xi, N);
  T.m = m;
  T.params = p;
  return T;
}

int sturm_count_below(const TridiagonalOperator& T, double x) {
  const int n = static_cast<int>(T.diag.size());
  double max_e2 = 0.0;
  for (double e : T.offdiag) max_e2 = std::max(max_e2, e * e);
  // Pivot floor in the spirit of the classic bisection codes: keeps the
  // recurrence finite without changing any sign count that matters.
  const double pivmin =
      std::numeric_limits<double>::min() * std::max(1.0, max_e2);
  int count = 0;
  double qv = T.diag[0] - x;
  if (std::abs(qv) < pivmin) qv = -pivmin;
  if (qv < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    const double e = T.offdiag[i - 1];
    qv = T.diag[i] - x - e * e / qv;
    if (std::abs(qv) < pivmin) qv = -pivmin;
    if (qv < 0.0) ++count;
  }
  return count;
}

std::vector<double> lowest_k(const TridiagonalOperator& T, int k,
                             double bisect_rtol) {
  const int n = static_cast<int>(T.diag.size());
  if (k < 1 || k > n) throw ConfigError("lowest_k: k out of range");
  // Gershgorin bounds
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(T.offdiag[i - 1]);
    if (i + 1 < n) r += std::abs(T.offdiag[i]);
    lo = std::min(lo, T.diag[i] - r);
    hi = std::max(hi, T.diag[i] + r);
  }
  std::vector<double> out;
  out.reserve(k);
  for (int idx = 0; idx < k; ++idx) {
    double a = lo, b = hi;
    // count(x) = #eigenvalues < x; we close in on the (idx+1)-smallest.
    while (b - a > bisect_rtol * std::max(1.0, 0.5 * std::abs(a + b))) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;  // interval at rounding limit
      if (sturm_count_below(T, mid) >= idx + 1) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out.push_back(0.5 * (a + b));
    lo = out.back();  // eigenvalues are sought in ascending order
  }
  return out;
}

namespace {

std::vector<double> lowest_k_for(const geometry::ModelParams& p, int m, int k,
                                 double Xi, int N, double rtol) {
  return lowest_k(assemble(p, m, Xi, N), k, rtol);
}

}  // namespace

std::vector<OracleValue> eigenvalues(const geometry::ModelParams& p, int m,
                                     int k, const OracleConfig& cfg) {
  if (cfg.N % 2 != 0 || cfg.N < 8) {
    throw ConfigError("oracle eigenvalues: N must be even and >= 8");
  }
  const double Xi = 1.0 + cfg.xi_factor / p.q;
  const double Xi2 = 1.0 + 1.5 * cfg.xi_factor / p.q;

  const auto fine = lowest_k_for(p, m, k, Xi, cfg.N, cfg.bisect_rtol);
  const auto half = lowest_k_for(p, m, k, Xi, cfg.N / 2, cfg.bisect_rtol);
  // Same mesh width on the larger box keeps the comparison about the domain.
  const int N2 = static_cast<int>(std::lround(cfg.N * (Xi2 - 1.0) / (Xi - 1.0)));
  const auto fine2 = lowest_k_for(p, m, k, Xi2, N2 + (N2 % 2), cfg.bisect_rtol);
  const auto half2 =
      lowest_k_for(p, m, k, Xi2, (N2 + (N2 % 2)) / 2, cfg.bisect_rtol);

  std::vector<OracleValue> out(k);
  for (int i = 0; i < k; ++i) {
    const double extrap = (4.0 * fine[i] - half[i]) / 3.0;
    const double extrap2 = (4.0 * fine2[i] - half2[i]) / 3.0;
    out[i].value = extrap;
    out[i].error_estimate =
        std::abs(fine[i] - half[i]) / 3.0 + std::abs(extrap - extrap2);
  }
  return out;
}

GoldenFile make_golden(const geometry::ModelParams& p, int m, int k,
                       const OracleConfig& cfg) {
  GoldenFile g;
  g.q = p.q;
  g.omega = p.omega;
  g.m = m;
  g.N = cfg.N;
  g.Xi = 1.0 + cfg.xi_factor / p.q;
  g.extrapolation = "richardson_h2";
  const auto vals = eigenvalues(p, m, k, cfg);
  for (int i = 0; i < k; ++i) {
    g.values.push_back(GoldenEntry{i, vals[i].value, vals[i].error_estimate});
  }
  return g;
}

std::string golden_to_json(const GoldenFile& g) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"params\": {\"q\": " << io::fp(g.q) << ", \"omega\": " << io::fp(g.omega)
     << ", \"m\": " << g.m << "},\n";
  os << "  \"method\": {\"N\": " << g.N << ", \"Xi\": " << io::fp(g.Xi)
     << ", \"extrapolation\": \"" << g.extrapolation << "\"},\n";
  os << "  \"values\": [\n";
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const auto& v = g.values[i];
    os << "    {\"n\": " << v.n << ", \"E_tilde\": " << io::fp(v.E_tilde)
       << ", \"err\": " << io::fp(v.err) << "}"
       << (i + 1 < g.values.size() ? "," : "") << "\n";
  }
  os << "  ]\n";
  os << "}\n";
  return os.str();
}

GoldenFile read_golden(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("read_golden: cannot open " + path);
  nlohmann::json j;
  in >> j;
  GoldenFile g;
  g.q = j.at("params").at("q").get<double>();
  g.omega = j.at("params").at("omega").get<double>();
  g.m = j.at("params").at("m").get<int>();
  g.N = j.at("method").at("N").get<int>();
  g.Xi = j.at("method").at("Xi").get<double>();
  g.extrapolation = j.at("method").at("extrapolation").get<std::string>();
  for (const auto& v : j.at("values")) {
    g.values.push_back(GoldenEntry{v.at("n").get<int>(),
                                   v.at("E_tilde").get<double>(),
                                   v.at("err").get<double>()});
  }
  return g;
}

}  // namespace lobosc::oracle
