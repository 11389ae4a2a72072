#include "hadamard/potential.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "hadamard/errors.hpp"

namespace hadamard {

Potential Potential::constant(int dim, double c) {
  Potential p(dim);
  p.constant_ = c;
  return p;
}

Potential Potential::bump(const Event& center, double width, double height) {
  Potential p(center.dim());
  p.add_bump({center, width, height});
  return p;
}

Potential& Potential::add_constant(double c) {
  constant_ += c;
  return *this;
}

Potential& Potential::add_bump(const Bump& b) {
  if (b.center.dim() != dim_) throw ConfigError("bump center has wrong dimension");
  if (!(b.width > 0.0)) throw ConfigError("bump width must be positive");
  if (b.height != 0.0) bumps_.push_back(b);
  return *this;
}

Potential& Potential::add_monomial(const Monomial& m) {
  bool constant = true;
  for (int i = 0; i < dim_; ++i) constant = constant && m.powers[i] == 0;
  if (constant) return add_constant(m.coefficient);
  if (m.coefficient != 0.0) monomials_.push_back(m);
  return *this;
}

Potential Potential::operator+(const Potential& o) const {
  Potential p = *this;
  p.constant_ += o.constant_;
  for (const auto& b : o.bumps_) p.bumps_.push_back(b);
  for (const auto& m : o.monomials_) p.monomials_.push_back(m);
  return p;
}

double Potential::value(const Event& y) const {
  double v = constant_;
  for (const auto& b : bumps_) {
    double r2 = 0.0;
    for (int i = 0; i < dim_; ++i) {
      double u = (y[i] - b.center[i]) / b.width;
      r2 += u * u;
    }
    v += b.height * std::exp(-r2);
  }
  for (const auto& m : monomials_) {
    double t = m.coefficient;
    for (int i = 0; i < dim_; ++i) t *= std::pow(y[i], m.powers[i]);
    v += t;
  }
  return v;
}

void Potential::jet(const Event& y, const MultiIndexSet& set, int order,
                    double* out) const {
  int n = set.count_up_to(order);
  for (int i = 0; i < n; ++i) out[i] = 0.0;
  out[0] = constant_;
  double tab[kMaxDim][80];
  if (order >= 79) throw UnsupportedOrderError("potential jet order too high");
  for (const auto& b : bumps_) {
    // d^n/dy^n exp(-u^2), u = (y - c)/w, equals (-1)^n H_n(u) exp(-u^2) / w^n.
    for (int i = 0; i < dim_; ++i) {
      double u = (y[i] - b.center[i]) / b.width;
      double g = std::exp(-u * u);
      double hm1 = 0.0, h = 1.0, sc = 1.0;
      for (int k = 0; k <= order; ++k) {
        tab[i][k] = ((k % 2) ? -1.0 : 1.0) * h * g * sc;
        double hn = 2.0 * u * h - 2.0 * k * hm1;
        hm1 = h;
        h = hn;
        sc /= b.width;
      }
    }
    for (int a = 0; a < n; ++a) {
      const MultiIndex& al = set.alpha(a);
      double p = b.height;
      for (int i = 0; i < dim_; ++i) p *= tab[i][al[i]];
      out[a] += p;
    }
  }
  for (const auto& m : monomials_) {
    for (int a = 0; a < n; ++a) {
      const MultiIndex& al = set.alpha(a);
      double p = m.coefficient;
      for (int i = 0; i < dim_ && p != 0.0; ++i) {
        int e = m.powers[i], k = al[i];
        if (k > e) {
          p = 0.0;
          break;
        }
        double f = 1.0;
        for (int j = e - k + 1; j <= e; ++j) f *= j;
        p *= f * std::pow(y[i], e - k);
      }
      out[a] += p;
    }
  }
}

std::string Potential::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << constant_;
  for (const auto& b : bumps_) {
    os << " + bump(";
    for (int i = 0; i < dim_; ++i) os << b.center[i] << ",";
    os << b.width << "," << b.height << ")";
  }
  static const char* names[] = {"t", "x1", "x2", "x3", "x4", "x5"};
  for (const auto& m : monomials_) {
    os << " + " << m.coefficient;
    for (int i = 0; i < dim_; ++i) {
      if (m.powers[i] == 0) continue;
      os << "*" << names[i];
      if (m.powers[i] > 1) os << "^" << m.powers[i];
    }
  }
  return os.str();
}

namespace {

class PotentialParser {
 public:
  PotentialParser(const std::string& s, int dim) : s_(s), dim_(dim) {}

  Potential run() {
    Potential p(dim_);
    skip();
    double sign = 1.0;
    if (peek() == '-') {
      sign = -1.0;
      ++pos_;
    } else if (peek() == '+') {
      ++pos_;
    }
    term(p, sign);
    while (true) {
      skip();
      if (pos_ >= s_.size()) break;
      char c = s_[pos_];
      if (c != '+' && c != '-') fail("expected + or -");
      ++pos_;
      term(p, c == '-' ? -1.0 : 1.0);
    }
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw ConfigError("potential \"" + s_ + "\": " + what + " at offset " +
                      std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool starts(const char* w) { return s_.compare(pos_, std::strlen(w), w) == 0; }

  double number() {
    skip();
    const char* b = s_.c_str() + pos_;
    char* e = nullptr;
    double v = std::strtod(b, &e);
    if (e == b) fail("expected a number");
    pos_ += static_cast<std::size_t>(e - b);
    return v;
  }

  int variable() {
    skip();
    if (peek() == 't') {
      ++pos_;
      return 0;
    }
    if (peek() == 'x') {
      ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        int k = s_[pos_] - '0';
        ++pos_;
        if (k < 1 || k >= dim_) fail("variable index out of range");
        return k;
      }
      if (dim_ < 2) fail("no spatial variable");
      return 1;
    }
    fail("expected a variable");
  }

  void bump(Potential& p, double coeff) {
    pos_ += 4;
    if (peek() != '(') fail("expected (");
    ++pos_;
    std::vector<double> args;
    while (true) {
      char c = peek();
      if (c == '[' || c == ']') {
        ++pos_;
        continue;
      }
      if (c == ')') {
        ++pos_;
        break;
      }
      if (c == ',') {
        ++pos_;
        continue;
      }
      args.push_back(number());
    }
    if (static_cast<int>(args.size()) != dim_ + 2) {
      fail("bump needs " + std::to_string(dim_) + " center coordinates, width, height");
    }
    Event c(dim_);
    for (int i = 0; i < dim_; ++i) c[i] = args[static_cast<std::size_t>(i)];
    p.add_bump({c, args[static_cast<std::size_t>(dim_)],
                coeff * args[static_cast<std::size_t>(dim_) + 1]});
  }

  void term(Potential& p, double sign) {
    double coeff = sign;
    MultiIndex pw{};
    bool any = false;
    while (true) {
      char c = peek();
      if (starts("bump")) {
        bump(p, coeff);
        // A bump term may only carry a numeric prefactor.
        char n = peek();
        if (n == '*') fail("bump must be the last factor of a term");
        return;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        coeff *= number();
      } else if (c == 't' || c == 'x') {
        int v = variable();
        int e = 1;
        if (peek() == '^') {
          ++pos_;
          double ev = number();
          if (ev < 0 || ev != std::floor(ev)) fail("exponent must be a nonnegative integer");
          e = static_cast<int>(ev);
        }
        pw[v] += e;
      } else {
        fail("unexpected character");
      }
      any = true;
      if (peek() == '*') {
        ++pos_;
        continue;
      }
      break;
    }
    if (!any) fail("empty term");
    p.add_monomial({coeff, pw});
  }

  std::string s_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Potential Potential::parse(const std::string& expr, int dim) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("potential: bad dimension");
  return PotentialParser(expr, dim).run();
}

OperatorSpec::OperatorSpec(ModelPtr m, Potential b, cplx shift)
    : model(std::move(m)), potential(std::move(b)), z(shift) {
  if (!model) throw std::invalid_argument("OperatorSpec: null model");
  if (potential.dim() == 0) potential = Potential(model->dimension());
  if (potential.dim() != model->dimension()) {
    throw ConfigError("potential dimension does not match the spacetime");
  }
}

OperatorSpec OperatorSpec::shifted(cplx dz) const {
  OperatorSpec o = *this;
  o.z += dz;
  return o;
}

void PotentialField::jet(const Event& y, const MultiIndexSet& set, int order,
                         cplx* out) const {
  int n = set.count_up_to(order);
  std::vector<double> buf(static_cast<std::size_t>(n));
  b_.jet(y, set, order, buf.data());
  for (int i = 0; i < n; ++i) out[i] = buf[static_cast<std::size_t>(i)];
}

void apply_operator_to_jet(const MultiIndexSet& set, int order,
                           const double* bjet, cplx z, const cplx* in,
                           cplx* out) {
  const int d = set.dim();
  int n = set.count_up_to(order);
  for (int i = 0; i < n; ++i) {
    cplx v = in[set.plus_two(i, 0)];
    for (int mu = 1; mu < d; ++mu) v -= in[set.plus_two(i, mu)];
    for (const auto& t : set.leibniz(i)) {
      double b = bjet[t.left];
      if (t.left == 0) {
        v += t.coefficient * (cplx(b) - z) * in[t.right];
      } else if (b != 0.0) {
        v += t.coefficient * b * in[t.right];
      }
    }
    out[i] = v;
  }
}

OperatorAppliedField::OperatorAppliedField(OperatorSpec op, JetFieldPtr f)
    : op_(std::move(op)), f_(std::move(f)) {}

void OperatorAppliedField::jet(const Event& y, const MultiIndexSet& set,
                               int order, cplx* out) const {
  auto big = MultiIndexSet::get(dim(), order + 2);
  std::vector<cplx> in(static_cast<std::size_t>(big->size()));
  f_->jet(y, *big, order + 2, in.data());
  std::vector<double> bj(static_cast<std::size_t>(big->count_up_to(order)));
  op_.potential.jet(y, *big, order, bj.data());
  std::vector<cplx> res(static_cast<std::size_t>(big->count_up_to(order)));
  apply_operator_to_jet(*big, order, bj.data(), op_.z, in.data(), res.data());
  std::copy(res.begin(), res.begin() + set.count_up_to(order), out);
}

namespace {

class OperatorSampler final : public RaySampler {
 public:
  OperatorSampler(const OperatorSpec& op, std::unique_ptr<RaySampler> inner,
                  const Event& from, const Event& to, int order)
      : op_(op), inner_(std::move(inner)), from_(from), step_(to - from),
        order_(order), set_(MultiIndexSet::get(op.dim(), order + 2)),
        in_(static_cast<std::size_t>(set_->size())),
        bj_(static_cast<std::size_t>(set_->count_up_to(order))) {}

  void jet(double s, cplx* out) override {
    inner_->jet(s, in_.data());
    op_.potential.jet(from_ + s * step_, *set_, order_, bj_.data());
    apply_operator_to_jet(*set_, order_, bj_.data(), op_.z, in_.data(), out);
  }

 private:
  const OperatorSpec& op_;
  std::unique_ptr<RaySampler> inner_;
  Event from_, step_;
  int order_;
  MultiIndexSetPtr set_;
  std::vector<cplx> in_;
  std::vector<double> bj_;
};

}  // namespace

std::unique_ptr<RaySampler> OperatorAppliedField::along_ray(const Event& from,
                                                            const Event& to,
                                                            int order) const {
  return std::make_unique<OperatorSampler>(op_, f_->along_ray(from, to, order + 2),
                                           from, to, order);
}

}  // namespace hadamard
