#include "switchjump/switching.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "switchjump/errors.hpp"

namespace switchjump {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_state(const RateMatrixSpec& spec, Regime s, const char* op) {
  if (s < 1 || s > spec.state_cap) {
    throw DomainError(std::string(op) + ": state " + std::to_string(s) + " outside 1.." +
                      std::to_string(spec.state_cap));
  }
}

double checked_rate(const RateMatrixSpec& spec, ConstVecView x, Regime i, Regime j) {
  const double q = spec.rate(x, i, j);
  if (!(q >= 0.0) || !std::isfinite(q)) {
    throw AssumptionError("rate q_" + std::to_string(i) + std::to_string(j) + "(x) is negative or non-finite");
  }
  return q;
}

// Sums f(terms), ..., f(1) from the small end.
double partial_sum(const std::function<double(std::int64_t)>& f, std::int64_t terms) {
  double sum = 0.0;
  double carry = 0.0;
  for (std::int64_t j = terms; j >= 1; --j) {
    const double y = f(j) - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

IntervalTable interval_table(const RateMatrixSpec& spec, ConstVecView x, Regime i) {
  require_state(spec, i, "interval_table");
  IntervalTable table;
  table.from = i;
  table.entries.reserve(static_cast<std::size_t>(spec.state_cap));
  double left = 0.0;
  for (Regime j = 1; j <= spec.state_cap; ++j) {
    if (j == i) continue;
    const double q = checked_rate(spec, x, i, j);
    table.entries.push_back({j, {left, left + q}});
    left += q;
  }
  return table;
}

std::optional<Interval> interval_endpoints(const RateMatrixSpec& spec, ConstVecView x, Regime i, Regime j) {
  if (i == j) throw DomainError("interval_endpoints: i == j has no interval");
  require_state(spec, i, "interval_endpoints");
  require_state(spec, j, "interval_endpoints");
  double left = 0.0;
  for (Regime s = 1; s < j; ++s) {
    if (s == i) continue;
    left += checked_rate(spec, x, i, s);
  }
  const double q = checked_rate(spec, x, i, j);
  if (q == 0.0) return std::nullopt;
  return Interval{left, left + q};
}

int h_eval(const RateMatrixSpec& spec, ConstVecView x, Regime i, double r, double L) {
  if (!(r >= 0.0 && r <= L)) {
    throw DomainError("h_eval: mark r outside [0, L]");
  }
  require_state(spec, i, "h_eval");
  double left = 0.0;
  for (Regime j = 1; j <= spec.state_cap; ++j) {
    if (j == i) continue;
    const double right = left + checked_rate(spec, x, i, j);
    if (left <= r && r < right) return j - i;
    left = right;
  }
  return 0;
}

double row_rate(const RateMatrixSpec& spec, ConstVecView x, Regime i) {
  require_state(spec, i, "row_rate");
  double total = 0.0;
  for (Regime j = 1; j <= spec.state_cap; ++j) {
    if (j != i) total += checked_rate(spec, x, i, j);
  }
  return total;
}

DominatingRate dominating_rate(const RateMatrixSpec& spec) {
  if (!spec.column_sup || !spec.tail_bound) {
    throw ConfigurationError("dominating_rate: column_sup and tail_bound are required");
  }
  const double tail = spec.tail_bound(spec.state_cap + 1);
  if (!std::isfinite(tail)) {
    throw AssumptionError("Q1 fails: tail bound of sum_j a(j) is infinite");
  }
  DominatingRate out;
  out.value = partial_sum(spec.column_sup, spec.state_cap) + tail;
  out.degenerate = out.value == 0.0;
  return out;
}

SeriesCheck check_Q1(const RateMatrixSpec& spec, std::int64_t terms) {
  if (terms <= 0) terms = std::max<std::int64_t>(spec.state_cap, 100000);
  SeriesCheck c;
  c.name = "Q1";
  c.terms = terms;
  c.bound = spec.tail_bound(terms + 1);
  if (!std::isfinite(c.bound)) {
    c.sum_estimate = kInf;
    c.pass = false;
    return c;
  }
  c.sum_estimate = partial_sum(spec.column_sup, terms) + c.bound;
  c.pass = std::isfinite(c.sum_estimate);
  return c;
}

SeriesCheck check_Q3(const RateMatrixSpec& spec, std::int64_t terms) {
  if (terms <= 0) terms = std::max<std::int64_t>(spec.state_cap, 100000);
  if (!spec.weighted_tail_bound) throw ConfigurationError("check_Q3: weighted_tail_bound is required");
  SeriesCheck c;
  c.name = "Q3";
  c.terms = terms;
  c.bound = spec.weighted_tail_bound(terms + 1);
  if (!std::isfinite(c.bound)) {
    c.sum_estimate = kInf;
    c.pass = false;
    return c;
  }
  c.sum_estimate =
      partial_sum([&](std::int64_t j) { return static_cast<double>(j) * spec.column_sup(j); }, terms) + c.bound;
  c.pass = std::isfinite(c.sum_estimate);
  return c;
}

ReachabilityCheck check_Q2(const RateMatrixSpec& spec, const std::vector<std::vector<double>>& probe_grid) {
  if (probe_grid.empty()) throw DomainError("check_Q2: empty probe grid");
  const auto n = static_cast<std::size_t>(spec.state_cap);
  ReachabilityCheck out;
  out.edges.assign(n, std::vector<bool>(n, false));
  for (const auto& x : probe_grid) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || out.edges[i][j]) continue;
        if (checked_rate(spec, x, static_cast<Regime>(i + 1), static_cast<Regime>(j + 1)) > 0.0) {
          out.edges[i][j] = true;
        }
      }
    }
  }
  // Transitive closure (Warshall).
  out.reachable = out.edges;
  for (std::size_t i = 0; i < n; ++i) out.reachable[i][i] = true;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!out.reachable[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (out.reachable[k][j]) out.reachable[i][j] = true;
      }
    }
  }
  out.pass = true;
  for (std::size_t i = 0; i < n && out.pass; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!out.reachable[i][j]) {
        out.pass = false;
        break;
      }
    }
  }
  return out;
}

int EscapeFunction::level(std::int64_t j) const {
  if (j < 1) throw DomainError("EscapeFunction::level: state index must be >= 1");
  if (rho.empty() || j >= rho.back()) {
    throw DomainError("EscapeFunction::level: index beyond certified range, increase depth");
  }
  const auto it = std::upper_bound(rho.begin(), rho.end(), j);
  return static_cast<int>(it - rho.begin());
}

EscapeFunction escape_function(const std::function<double(std::int64_t)>& a,
                               const std::function<double(std::int64_t)>& tail_bound, int depth) {
  if (depth < 2) throw DomainError("escape_function: depth must be at least 2");
  constexpr std::int64_t kMaxIndex = std::int64_t{1} << 62;
  constexpr std::int64_t kMaxSummed = 50'000'000;

  EscapeFunction out;
  out.rho.push_back(1);
  for (int n = 2; n <= depth; ++n) {
    const double target = std::ldexp(1.0, -n);
    const std::int64_t lo = out.rho.back() + 2;
    auto ok = [&](std::int64_t r) { return tail_bound(r) <= target; };
    if (ok(lo)) {
      out.rho.push_back(lo);
      continue;
    }
    // Exponential search for a passing index, then bisection on (fail, pass].
    std::int64_t fail = lo;
    std::int64_t step = 1;
    std::int64_t pass = lo;
    for (;;) {
      if (step > kMaxIndex - lo) {
        throw DepthExhausted("escape_function: tail condition 2^-" + std::to_string(n) +
                             " never met; Q1 may fail or depth is too large");
      }
      pass = lo + step;
      if (ok(pass)) break;
      fail = pass;
      step *= 2;
    }
    while (pass - fail > 1) {
      const std::int64_t mid = fail + (pass - fail) / 2;
      if (ok(mid)) {
        pass = mid;
      } else {
        fail = mid;
      }
    }
    out.rho.push_back(pass);
  }

  const std::int64_t last = out.rho.back();
  if (last - 1 > kMaxSummed) {
    throw DepthExhausted("escape_function: rho_depth = " + std::to_string(last) + " is too large to sum; reduce depth");
  }
  double head = 0.0;
  double weighted = 0.0;
  int level = 1;
  for (std::int64_t j = 1; j < last; ++j) {
    while (level < depth && j >= out.rho[static_cast<std::size_t>(level)]) ++level;
    const double aj = a(j);
    if (j < out.rho[1]) head += aj;
    weighted += aj * level;
  }
  out.head_sum = head;
  out.weighted_sum_estimate = weighted + depth * tail_bound(last) + std::ldexp(1.0, -depth);
  out.certified_bound = head + 1.5;
  return out;
}

double embedded_jump_probability(const RateMatrixSpec& spec, ConstVecView x, Regime i, Regime j) {
  require_state(spec, i, "embedded_jump_probability");
  require_state(spec, j, "embedded_jump_probability");
  const double qi = row_rate(spec, x, i);
  if (qi == 0.0) return i == j ? 1.0 : 0.0;
  if (i == j) return 0.0;
  return checked_rate(spec, x, i, j) / qi;
}

double truncation_bound(const RateMatrixSpec& spec) { return spec.tail_bound(spec.state_cap + 1); }

std::string format_assumption_report(const std::vector<AssumptionLine>& lines) {
  std::ostringstream os;
  os << std::setprecision(12);
  for (const auto& l : lines) {
    os << l.name << ' ' << l.estimate << ' ' << l.bound << ' ' << (l.pass ? "PASS" : "FAIL") << '\n';
  }
  return os.str();
}

RateMatrixSpec constant_rate_spec(const std::vector<std::vector<double>>& generator) {
  const std::size_t n = generator.size();
  if (n == 0) throw ConfigurationError("constant_rate_spec: empty generator");
  for (const auto& row : generator) {
    if (row.size() != n) throw ConfigurationError("constant_rate_spec: generator is not square");
  }
  std::vector<double> col_sup(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (generator[i][j] < 0.0) throw ConfigurationError("constant_rate_spec: negative off-diagonal rate");
      col_sup[j] = std::max(col_sup[j], generator[i][j]);
    }
  }
  // tails[r-1] = sum_{j >= r} a(j), weighted[r-1] = sum_{j >= r} j a(j).
  std::vector<double> tails(n + 1, 0.0), weighted(n + 1, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    tails[r] = tails[r + 1] + col_sup[r];
    weighted[r] = weighted[r + 1] + static_cast<double>(r + 1) * col_sup[r];
  }

  RateMatrixSpec spec;
  spec.state_cap = static_cast<int>(n);
  spec.x_independent = true;
  spec.rate = [generator](ConstVecView, Regime i, Regime j) {
    const auto n = generator.size();
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n || i == j) return 0.0;
    return generator[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
  };
  spec.column_sup = [col_sup](std::int64_t j) {
    return (j >= 1 && static_cast<std::size_t>(j) <= col_sup.size()) ? col_sup[static_cast<std::size_t>(j - 1)] : 0.0;
  };
  spec.tail_bound = [tails](std::int64_t r) {
    if (r < 1) r = 1;
    return static_cast<std::size_t>(r) <= tails.size() ? tails[static_cast<std::size_t>(r - 1)] : 0.0;
  };
  spec.weighted_tail_bound = [weighted](std::int64_t r) {
    if (r < 1) r = 1;
    return static_cast<std::size_t>(r) <= weighted.size() ? weighted[static_cast<std::size_t>(r - 1)] : 0.0;
  };
  return spec;
}

}  // namespace switchjump
