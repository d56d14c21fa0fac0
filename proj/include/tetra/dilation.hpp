#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "tetra/fundamental.hpp"
#include "tetra/linalg.hpp"
#include "tetra/report.hpp"

namespace tetra {

/// Finitely supported element of a block sequence space: blocks[k] is the
/// coefficient vector at tail position k. An empty vector is zero.
struct TailVector {
  std::vector<ComplexVector> blocks;

  int support() const { return static_cast<int>(blocks.size()); }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& b : blocks) s += b.squaredNorm();
    return s;
  }

  void trim() {
    while (!blocks.empty() && blocks.back().isZero(0.0)) blocks.pop_back();
  }
};

/// Element of the dilation space H + l2(D_P) + l2(D_{P*}). Operators of
/// kind v1..v3 act on the first two components, d1..d3 on the last, the
/// coupling kinds c1..c3 map the last into the first two, and r1, r2, u
/// act on everything.
struct DilationVector {
  ComplexVector h;
  TailVector tail_p;
  TailVector tail_pstar;

  double norm() const {
    return std::sqrt(h.squaredNorm() + tail_p.squared_norm() + tail_pstar.squared_norm());
  }
};

inline Complex inner_product(const DilationVector& x, const DilationVector& y) {
  if (x.h.size() != y.h.size())
    throw std::invalid_argument("inner_product: ambient dimension mismatch");
  Complex s = x.h.dot(y.h);
  auto tail_part = [](const TailVector& a, const TailVector& b) {
    Complex t = 0.0;
    const int common = std::min(a.support(), b.support());
    for (int k = 0; k < common; ++k) t += a.blocks[k].dot(b.blocks[k]);
    return t;
  };
  return s + tail_part(x.tail_p, y.tail_p) + tail_part(x.tail_pstar, y.tail_pstar);
}

inline DilationVector operator+(const DilationVector& x, const DilationVector& y) {
  if (x.h.size() != y.h.size()) throw std::invalid_argument("dilation vector sum: shape mismatch");
  DilationVector out;
  out.h = x.h + y.h;
  auto add_tails = [](const TailVector& a, const TailVector& b) {
    TailVector t;
    const int n = std::max(a.support(), b.support());
    t.blocks.reserve(n);
    for (int k = 0; k < n; ++k) {
      if (k < a.support() && k < b.support())
        t.blocks.push_back(a.blocks[k] + b.blocks[k]);
      else if (k < a.support())
        t.blocks.push_back(a.blocks[k]);
      else
        t.blocks.push_back(b.blocks[k]);
    }
    return t;
  };
  out.tail_p = add_tails(x.tail_p, y.tail_p);
  out.tail_pstar = add_tails(x.tail_pstar, y.tail_pstar);
  return out;
}

inline DilationVector operator-(const DilationVector& x, const DilationVector& y) {
  DilationVector neg = y;
  neg.h = -neg.h;
  for (auto& b : neg.tail_p.blocks) b = -b;
  for (auto& b : neg.tail_pstar.blocks) b = -b;
  return x + neg;
}

inline DilationVector operator*(const Complex& c, const DilationVector& x) {
  DilationVector out = x;
  out.h *= c;
  for (auto& b : out.tail_p.blocks) b *= c;
  for (auto& b : out.tail_pstar.blocks) b *= c;
  return out;
}

/// All matrix data of the block dilation, in defect coordinates. The
/// fields prefixed v1/v2/v3, c1/c2/c3, d1/d2 are the literal blocks the
/// operators read; everything else is the shared payload they were built
/// from. Keeping the blocks as separate fields makes single-block
/// perturbation experiments trivial.
struct DilationBlocks {
  ComplexMatrix a, b, p;        // the triple on H
  DefectSpace dp, dps;          // defect data of P and P*
  ComplexMatrix f1, f2, g1, g2; // fundamental pairs in defect coordinates

  ComplexMatrix dp_c;     // coords of D_P h          (dim_p  x n)
  ComplexMatrix dps_c;    // coords of D_{P*} h       (dim_ps x n)
  ComplexMatrix pstar_c;  // coords of P* across defects (dim_p x dim_ps)

  // V_i = [[corner, 0], [couple at position 0, diag + sub structure]]
  ComplexMatrix v1_corner, v1_couple, v1_diag, v1_sub;
  ComplexMatrix v2_corner, v2_couple, v2_diag, v2_sub;
  ComplexMatrix v3_corner, v3_couple;  // tail action of V3 is the pure shift

  // C_i reads position 0 of the adjoint tail, writes H and position 0.
  ComplexMatrix c1_h, c1_t;
  ComplexMatrix c2_h, c2_t;
  ComplexMatrix c3_h, c3_t;

  // D_i: (D_i b)_k = diag b_k + super b_{k+1}; D3 is the backward shift.
  ComplexMatrix d1_diag, d1_super;
  ComplexMatrix d2_diag, d2_super;

  Eigen::Index dim_h() const { return a.rows(); }
  int dim_p() const { return dp.dim; }
  int dim_ps() const { return dps.dim; }
};

/// Assembles the block data of the dilation:
///   V1 = A + (F2* D_P at position 0, then diag F1 / sub F2*),
///   V2 the same with (B, F1*, F2),  V3 = P + (D_P at position 0, shift),
///   C1 = D_{P*} G2 into H and -F2* P* into tail position 0,
///   C2 the same with (G1, -F1* P*),  C3 = (D_{P*}, -P*),
///   D1 = diag G1* + super G2,  D2 = diag G2* + super G1,  D3 = shift.
inline std::shared_ptr<const DilationBlocks> make_dilation_blocks(const FundamentalData& data) {
  auto blk = std::make_shared<DilationBlocks>();
  blk->a = data.triple.a;
  blk->b = data.triple.b;
  blk->p = data.triple.p;
  blk->dp = data.dp;
  blk->dps = data.dps;
  blk->f1 = data.f.f1;
  blk->f2 = data.f.f2;
  blk->g1 = data.g.f1;
  blk->g2 = data.g.f2;

  blk->dp_c = blk->dp.embed.adjoint() * blk->dp.defect;
  blk->dps_c = blk->dps.embed.adjoint() * blk->dps.defect;
  blk->pstar_c = blk->dp.embed.adjoint() * (blk->p.adjoint() * blk->dps.embed);

  blk->v1_corner = blk->a;
  blk->v1_couple = blk->f2.adjoint() * blk->dp_c;
  blk->v1_diag = blk->f1;
  blk->v1_sub = blk->f2.adjoint();

  blk->v2_corner = blk->b;
  blk->v2_couple = blk->f1.adjoint() * blk->dp_c;
  blk->v2_diag = blk->f2;
  blk->v2_sub = blk->f1.adjoint();

  blk->v3_corner = blk->p;
  blk->v3_couple = blk->dp_c;

  blk->c1_h = blk->dps_c.adjoint() * blk->g2;
  blk->c1_t = -(blk->f2.adjoint() * blk->pstar_c);
  blk->c2_h = blk->dps_c.adjoint() * blk->g1;
  blk->c2_t = -(blk->f1.adjoint() * blk->pstar_c);
  blk->c3_h = blk->dps_c.adjoint();
  blk->c3_t = -blk->pstar_c;

  blk->d1_diag = blk->g1.adjoint();
  blk->d1_super = blk->g2;
  blk->d2_diag = blk->g2.adjoint();
  blk->d2_super = blk->g1;
  return blk;
}

enum class OperatorKind { v1, v2, v3, c1, c2, c3, d1, d2, d3, r1, r2, u, identity };

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::v1: return "v1";
    case OperatorKind::v2: return "v2";
    case OperatorKind::v3: return "v3";
    case OperatorKind::c1: return "c1";
    case OperatorKind::c2: return "c2";
    case OperatorKind::c3: return "c3";
    case OperatorKind::d1: return "d1";
    case OperatorKind::d2: return "d2";
    case OperatorKind::d3: return "d3";
    case OperatorKind::r1: return "r1";
    case OperatorKind::r2: return "r2";
    case OperatorKind::u: return "u";
    case OperatorKind::identity: return "identity";
  }
  return "unknown";
}

namespace detail {

inline void check_tail(const TailVector& t, int dim, const char* who) {
  for (const auto& b : t.blocks)
    if (b.size() != dim)
      throw std::invalid_argument(std::string(who) + ": tail block dimension mismatch");
}

inline void check_vector(const DilationBlocks& blk, const DilationVector& x, const char* who) {
  if (x.h.size() != blk.dim_h())
    throw std::invalid_argument(std::string(who) + ": ambient dimension mismatch");
  check_tail(x.tail_p, blk.dim_p(), who);
  check_tail(x.tail_pstar, blk.dim_ps(), who);
}

inline const ComplexVector& tail_block(const TailVector& t, int k, const ComplexVector& zero) {
  return (k >= 0 && k < t.support()) ? t.blocks[k] : zero;
}

/// Forward action shared by V1 and V2:
///   h' = corner h,  tail'_0 = couple h + diag a_0,  tail'_k = sub a_{k-1} + diag a_k.
inline DilationVector v_forward(const DilationBlocks& blk, const ComplexMatrix& corner,
                                const ComplexMatrix& couple, const ComplexMatrix& diag,
                                const ComplexMatrix& sub, const DilationVector& x) {
  const ComplexVector zero = ComplexVector::Zero(blk.dim_p());
  DilationVector out;
  out.h = corner * x.h;
  const int s = x.tail_p.support();
  out.tail_p.blocks.resize(s + 1);
  for (int k = 0; k <= s; ++k) {
    ComplexVector v = (k == 0) ? ComplexVector(couple * x.h)
                               : ComplexVector(sub * tail_block(x.tail_p, k - 1, zero));
    if (k < s) v += diag * x.tail_p.blocks[k];
    out.tail_p.blocks[k] = std::move(v);
  }
  out.tail_p.trim();
  return out;
}

/// Adjoint of v_forward:
///   h' = corner* h + couple* a_0,  tail'_k = diag* a_k + sub* a_{k+1}.
inline DilationVector v_adjoint(const DilationBlocks& blk, const ComplexMatrix& corner,
                                const ComplexMatrix& couple, const ComplexMatrix& diag,
                                const ComplexMatrix& sub, const DilationVector& x) {
  const ComplexVector zero = ComplexVector::Zero(blk.dim_p());
  DilationVector out;
  out.h = corner.adjoint() * x.h + couple.adjoint() * tail_block(x.tail_p, 0, zero);
  const int s = x.tail_p.support();
  out.tail_p.blocks.resize(s);
  for (int k = 0; k < s; ++k)
    out.tail_p.blocks[k] =
        diag.adjoint() * x.tail_p.blocks[k] + sub.adjoint() * tail_block(x.tail_p, k + 1, zero);
  out.tail_p.trim();
  return out;
}

/// V3: h' = P h, tail'_0 = D_P h, tail'_{k+1} = a_k.
inline DilationVector v3_forward(const DilationBlocks& blk, const DilationVector& x) {
  DilationVector out;
  out.h = blk.v3_corner * x.h;
  out.tail_p.blocks.resize(x.tail_p.support() + 1);
  out.tail_p.blocks[0] = blk.v3_couple * x.h;
  for (int k = 0; k < x.tail_p.support(); ++k) out.tail_p.blocks[k + 1] = x.tail_p.blocks[k];
  out.tail_p.trim();
  return out;
}

inline DilationVector v3_adjoint(const DilationBlocks& blk, const DilationVector& x) {
  const ComplexVector zero = ComplexVector::Zero(blk.dim_p());
  DilationVector out;
  out.h = blk.v3_corner.adjoint() * x.h + blk.v3_couple.adjoint() * tail_block(x.tail_p, 0, zero);
  const int s = x.tail_p.support();
  for (int k = 1; k < s; ++k) out.tail_p.blocks.push_back(x.tail_p.blocks[k]);
  out.tail_p.trim();
  return out;
}

/// C_i: reads position 0 of the adjoint tail, writes (mix_h b_0) into H and
/// (mix_t b_0) into tail position 0.
inline DilationVector c_forward(const DilationBlocks& blk, const ComplexMatrix& mix_h,
                                const ComplexMatrix& mix_t, const DilationVector& x) {
  const ComplexVector zero = ComplexVector::Zero(blk.dim_ps());
  const ComplexVector& b0 = tail_block(x.tail_pstar, 0, zero);
  DilationVector out;
  out.h = mix_h * b0;
  out.tail_p.blocks.push_back(mix_t * b0);
  out.tail_p.trim();
  return out;
}

inline DilationVector c_adjoint(const DilationBlocks& blk, const ComplexMatrix& mix_h,
                                const ComplexMatrix& mix_t, const DilationVector& x) {
  const ComplexVector zero = ComplexVector::Zero(blk.dim_p());
  DilationVector out;
  out.h = ComplexVector::Zero(blk.dim_h());
  out.tail_pstar.blocks.push_back(mix_h.adjoint() * x.h +
                                  mix_t.adjoint() * tail_block(x.tail_p, 0, zero));
  out.tail_pstar.trim();
  return out;
}

/// D_i: (D_i b)_k = diag b_k + super b_{k+1}.
inline DilationVector d_forward(const DilationBlocks& blk, const ComplexMatrix& diag,
                                const ComplexMatrix& super, const DilationVector& x) {
  const ComplexVector zero = ComplexVector::Zero(blk.dim_ps());
  DilationVector out;
  out.h = ComplexVector::Zero(blk.dim_h());
  const int s = x.tail_pstar.support();
  out.tail_pstar.blocks.resize(s);
  for (int k = 0; k < s; ++k)
    out.tail_pstar.blocks[k] =
        diag * x.tail_pstar.blocks[k] + super * tail_block(x.tail_pstar, k + 1, zero);
  out.tail_pstar.trim();
  return out;
}

inline DilationVector d_adjoint(const DilationBlocks& blk, const ComplexMatrix& diag,
                                const ComplexMatrix& super, const DilationVector& x) {
  const ComplexVector zero = ComplexVector::Zero(blk.dim_ps());
  DilationVector out;
  out.h = ComplexVector::Zero(blk.dim_h());
  const int s = x.tail_pstar.support();
  out.tail_pstar.blocks.resize(s + 1);
  for (int k = 0; k <= s; ++k)
    out.tail_pstar.blocks[k] = diag.adjoint() * tail_block(x.tail_pstar, k, zero) +
                               super.adjoint() * tail_block(x.tail_pstar, k - 1, zero);
  out.tail_pstar.trim();
  return out;
}

inline DilationVector d3_forward(const DilationBlocks& blk, const DilationVector& x) {
  DilationVector out;
  out.h = ComplexVector::Zero(blk.dim_h());
  for (int k = 1; k < x.tail_pstar.support(); ++k)
    out.tail_pstar.blocks.push_back(x.tail_pstar.blocks[k]);
  out.tail_pstar.trim();
  return out;
}

inline DilationVector d3_adjoint(const DilationBlocks& blk, const DilationVector& x) {
  DilationVector out;
  out.h = ComplexVector::Zero(blk.dim_h());
  if (x.tail_pstar.support() > 0) {
    out.tail_pstar.blocks.push_back(ComplexVector::Zero(blk.dim_ps()));
    for (const auto& b : x.tail_pstar.blocks) out.tail_pstar.blocks.push_back(b);
  }
  out.tail_pstar.trim();
  return out;
}

inline void require_no_adjoint_tail(const DilationVector& x, const char* who) {
  if (x.tail_pstar.support() != 0)
    throw std::invalid_argument(std::string(who) + ": operator does not act on the adjoint tail");
}

inline void require_pure_adjoint_tail(const DilationVector& x, const char* who) {
  if (!x.h.isZero(0.0) || x.tail_p.support() != 0)
    throw std::invalid_argument(std::string(who) + ": operator acts on the adjoint tail only");
}

}  // namespace detail

/// One block operator of the dilation, identified by kind, acting on
/// shared block data. Application is truncation-free: finitely supported
/// vectors map to finitely supported vectors, with support growing by at
/// most one position.
class DilationOperator {
 public:
  DilationOperator(OperatorKind kind, std::shared_ptr<const DilationBlocks> blocks)
      : kind_(kind), blocks_(std::move(blocks)) {
    if (!blocks_) throw std::invalid_argument("DilationOperator: missing block data");
  }

  OperatorKind kind() const { return kind_; }
  const DilationBlocks& blocks() const { return *blocks_; }
  std::shared_ptr<const DilationBlocks> payload() const { return blocks_; }

  DilationVector apply(const DilationVector& x) const {
    const DilationBlocks& blk = *blocks_;
    detail::check_vector(blk, x, "apply");
    using namespace detail;
    switch (kind_) {
      case OperatorKind::v1:
        require_no_adjoint_tail(x, "apply(v1)");
        return v_forward(blk, blk.v1_corner, blk.v1_couple, blk.v1_diag, blk.v1_sub, x);
      case OperatorKind::v2:
        require_no_adjoint_tail(x, "apply(v2)");
        return v_forward(blk, blk.v2_corner, blk.v2_couple, blk.v2_diag, blk.v2_sub, x);
      case OperatorKind::v3:
        require_no_adjoint_tail(x, "apply(v3)");
        return v3_forward(blk, x);
      case OperatorKind::c1:
        require_pure_adjoint_tail(x, "apply(c1)");
        return c_forward(blk, blk.c1_h, blk.c1_t, x);
      case OperatorKind::c2:
        require_pure_adjoint_tail(x, "apply(c2)");
        return c_forward(blk, blk.c2_h, blk.c2_t, x);
      case OperatorKind::c3:
        require_pure_adjoint_tail(x, "apply(c3)");
        return c_forward(blk, blk.c3_h, blk.c3_t, x);
      case OperatorKind::d1:
        require_pure_adjoint_tail(x, "apply(d1)");
        return d_forward(blk, blk.d1_diag, blk.d1_super, x);
      case OperatorKind::d2:
        require_pure_adjoint_tail(x, "apply(d2)");
        return d_forward(blk, blk.d2_diag, blk.d2_super, x);
      case OperatorKind::d3:
        require_pure_adjoint_tail(x, "apply(d3)");
        return d3_forward(blk, x);
      case OperatorKind::r1:
        return combine(v_forward(blk, blk.v1_corner, blk.v1_couple, blk.v1_diag, blk.v1_sub,
                                 upper_part(x)),
                       c_forward(blk, blk.c1_h, blk.c1_t, lower_part(blk, x)),
                       d_forward(blk, blk.d1_diag, blk.d1_super, lower_part(blk, x)));
      case OperatorKind::r2:
        return combine(v_forward(blk, blk.v2_corner, blk.v2_couple, blk.v2_diag, blk.v2_sub,
                                 upper_part(x)),
                       c_forward(blk, blk.c2_h, blk.c2_t, lower_part(blk, x)),
                       d_forward(blk, blk.d2_diag, blk.d2_super, lower_part(blk, x)));
      case OperatorKind::u:
        return combine(v3_forward(blk, upper_part(x)),
                       c_forward(blk, blk.c3_h, blk.c3_t, lower_part(blk, x)),
                       d3_forward(blk, lower_part(blk, x)));
      case OperatorKind::identity:
        return x;
    }
    throw std::logic_error("apply: unknown operator kind");
  }

  DilationVector apply_adjoint(const DilationVector& x) const {
    const DilationBlocks& blk = *blocks_;
    detail::check_vector(blk, x, "apply_adjoint");
    using namespace detail;
    switch (kind_) {
      case OperatorKind::v1:
        require_no_adjoint_tail(x, "apply_adjoint(v1)");
        return v_adjoint(blk, blk.v1_corner, blk.v1_couple, blk.v1_diag, blk.v1_sub, x);
      case OperatorKind::v2:
        require_no_adjoint_tail(x, "apply_adjoint(v2)");
        return v_adjoint(blk, blk.v2_corner, blk.v2_couple, blk.v2_diag, blk.v2_sub, x);
      case OperatorKind::v3:
        require_no_adjoint_tail(x, "apply_adjoint(v3)");
        return v3_adjoint(blk, x);
      case OperatorKind::c1:
        require_no_adjoint_tail(x, "apply_adjoint(c1)");
        return c_adjoint(blk, blk.c1_h, blk.c1_t, x);
      case OperatorKind::c2:
        require_no_adjoint_tail(x, "apply_adjoint(c2)");
        return c_adjoint(blk, blk.c2_h, blk.c2_t, x);
      case OperatorKind::c3:
        require_no_adjoint_tail(x, "apply_adjoint(c3)");
        return c_adjoint(blk, blk.c3_h, blk.c3_t, x);
      case OperatorKind::d1:
        require_pure_adjoint_tail(x, "apply_adjoint(d1)");
        return d_adjoint(blk, blk.d1_diag, blk.d1_super, x);
      case OperatorKind::d2:
        require_pure_adjoint_tail(x, "apply_adjoint(d2)");
        return d_adjoint(blk, blk.d2_diag, blk.d2_super, x);
      case OperatorKind::d3:
        require_pure_adjoint_tail(x, "apply_adjoint(d3)");
        return d3_adjoint(blk, x);
      case OperatorKind::r1: {
        DilationVector up = v_adjoint(blk, blk.v1_corner, blk.v1_couple, blk.v1_diag, blk.v1_sub,
                                      upper_part(x));
        DilationVector low = c_adjoint(blk, blk.c1_h, blk.c1_t, upper_part(x)) +
                             d_adjoint(blk, blk.d1_diag, blk.d1_super, lower_part(blk, x));
        up.tail_pstar = std::move(low.tail_pstar);
        return up;
      }
      case OperatorKind::r2: {
        DilationVector up = v_adjoint(blk, blk.v2_corner, blk.v2_couple, blk.v2_diag, blk.v2_sub,
                                      upper_part(x));
        DilationVector low = c_adjoint(blk, blk.c2_h, blk.c2_t, upper_part(x)) +
                             d_adjoint(blk, blk.d2_diag, blk.d2_super, lower_part(blk, x));
        up.tail_pstar = std::move(low.tail_pstar);
        return up;
      }
      case OperatorKind::u: {
        DilationVector up = v3_adjoint(blk, upper_part(x));
        DilationVector low = c_adjoint(blk, blk.c3_h, blk.c3_t, upper_part(x)) +
                             d3_adjoint(blk, lower_part(blk, x));
        up.tail_pstar = std::move(low.tail_pstar);
        return up;
      }
      case OperatorKind::identity:
        return x;
    }
    throw std::logic_error("apply_adjoint: unknown operator kind");
  }

 private:
  static DilationVector upper_part(const DilationVector& x) {
    DilationVector out;
    out.h = x.h;
    out.tail_p = x.tail_p;
    return out;
  }

  static DilationVector lower_part(const DilationBlocks& blk, const DilationVector& x) {
    DilationVector out;
    out.h = ComplexVector::Zero(blk.dim_h());
    out.tail_pstar = x.tail_pstar;
    return out;
  }

  static DilationVector combine(DilationVector upper, DilationVector coupled,
                                DilationVector lower) {
    DilationVector out = upper + coupled;
    out.tail_pstar = std::move(lower.tail_pstar);
    return out;
  }

  OperatorKind kind_;
  std::shared_ptr<const DilationBlocks> blocks_;
};

inline DilationVector apply(const DilationOperator& op, const DilationVector& x) {
  return op.apply(x);
}

inline DilationVector apply_adjoint(const DilationOperator& op, const DilationVector& x) {
  return op.apply_adjoint(x);
}

inline DilationVector apply_power(const DilationOperator& op, DilationVector x, int power) {
  if (power < 0) throw std::invalid_argument("apply_power: negative power");
  for (int i = 0; i < power; ++i) x = op.apply(x);
  return x;
}

/// Embeds an ambient vector as h + 0 + 0.
inline DilationVector embed_ambient(const DilationBlocks& blk, const ComplexVector& h) {
  if (h.size() != blk.dim_h()) throw std::invalid_argument("embed_ambient: dimension mismatch");
  DilationVector v;
  v.h = h;
  return v;
}

inline DilationVector basis_h(const DilationBlocks& blk, Eigen::Index i) {
  DilationVector v;
  v.h = ComplexVector::Zero(blk.dim_h());
  v.h(i) = 1.0;
  return v;
}

inline DilationVector basis_tail_p(const DilationBlocks& blk, int coord, int position) {
  DilationVector v;
  v.h = ComplexVector::Zero(blk.dim_h());
  v.tail_p.blocks.assign(position + 1, ComplexVector::Zero(blk.dim_p()));
  v.tail_p.blocks[position](coord) = 1.0;
  return v;
}

inline DilationVector basis_tail_pstar(const DilationBlocks& blk, int coord, int position) {
  DilationVector v;
  v.h = ComplexVector::Zero(blk.dim_h());
  v.tail_pstar.blocks.assign(position + 1, ComplexVector::Zero(blk.dim_ps()));
  v.tail_pstar.blocks[position](coord) = 1.0;
  return v;
}

/// Random finitely supported vector with Gaussian entries, used by the
/// sampling-based verifiers.
inline DilationVector random_dilation_vector(const DilationBlocks& blk, std::mt19937_64& rng,
                                             int tail_support = 3) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto cvec = [&](Eigen::Index m) {
    ComplexVector v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    return v;
  };
  DilationVector v;
  v.h = cvec(blk.dim_h());
  for (int k = 0; k < tail_support; ++k) {
    if (blk.dim_p() > 0) v.tail_p.blocks.push_back(cvec(blk.dim_p()));
    if (blk.dim_ps() > 0) v.tail_pstar.blocks.push_back(cvec(blk.dim_ps()));
  }
  return v;
}

/// The isometric dilation (V1, V2, V3) on H + l2(D_P).
struct IsometricDilation {
  std::shared_ptr<const DilationBlocks> blocks;
  DilationOperator op(OperatorKind k) const { return DilationOperator(k, blocks); }
  DilationOperator v1() const { return op(OperatorKind::v1); }
  DilationOperator v2() const { return op(OperatorKind::v2); }
  DilationOperator v3() const { return op(OperatorKind::v3); }
};

/// The unitary dilation (R1, R2, U) on H + l2(D_P) + l2(D_{P*}).
struct UnitaryDilation {
  std::shared_ptr<const DilationBlocks> blocks;
  DilationOperator op(OperatorKind k) const { return DilationOperator(k, blocks); }
  DilationOperator r1() const { return op(OperatorKind::r1); }
  DilationOperator r2() const { return op(OperatorKind::r2); }
  DilationOperator u() const { return op(OperatorKind::u); }
};

inline void require_dilation_hypothesis(const FundamentalPair& f, double tol) {
  const PairCondition c = commutation_defects(f);
  if (c.commutator > tol)
    throw Error("dilation hypothesis fails: fundamental pair does not commute");
  if (c.selfcommutator_gap > tol)
    throw Error("dilation hypothesis fails: unbalanced self-commutators");
}

inline IsometricDilation build_isometric_dilation(const FundamentalData& data, double tol = 1e-9) {
  require_dilation_hypothesis(data.f, tol);
  return IsometricDilation{make_dilation_blocks(data)};
}

inline UnitaryDilation build_unitary_dilation(const FundamentalData& data, double tol = 1e-9) {
  require_dilation_hypothesis(data.f, tol);
  return UnitaryDilation{make_dilation_blocks(data)};
}

/// Slots of R1 = [[V1, C1], [0, D1]] for perturbation experiments.
enum class R1Block {
  corner,      // A               (H <- H)
  couple,      // F2* D_P         (tail 0 <- H)
  diag,        // F1              (tail diagonal)
  sub,         // F2*             (tail subdiagonal)
  mix_h,       // D_{P*} G2       (H <- adjoint tail 0)
  mix_t,       // -F2* P*         (tail 0 <- adjoint tail 0)
  tail_diag,   // G1*             (adjoint tail diagonal)
  tail_super,  // G2              (adjoint tail superdiagonal)
};

/// Returns a copy of R1 with `delta` added to one block; every other block
/// keeps the constructed value. Used to confirm that verification detects
/// single-block corruption.
inline DilationOperator perturbed_r1(const UnitaryDilation& dil, R1Block slot,
                                     const ComplexMatrix& delta) {
  auto modified = std::make_shared<DilationBlocks>(*dil.blocks);
  ComplexMatrix* target = nullptr;
  switch (slot) {
    case R1Block::corner: target = &modified->v1_corner; break;
    case R1Block::couple: target = &modified->v1_couple; break;
    case R1Block::diag: target = &modified->v1_diag; break;
    case R1Block::sub: target = &modified->v1_sub; break;
    case R1Block::mix_h: target = &modified->c1_h; break;
    case R1Block::mix_t: target = &modified->c1_t; break;
    case R1Block::tail_diag: target = &modified->d1_diag; break;
    case R1Block::tail_super: target = &modified->d1_super; break;
  }
  if (target->rows() != delta.rows() || target->cols() != delta.cols())
    throw std::invalid_argument("perturbed_r1: delta shape does not match the block");
  *target += delta;
  return DilationOperator(OperatorKind::r1, std::move(modified));
}

struct TruncatedOperator {
  ComplexMatrix matrix;
  double edge_defect = 0.0;  // largest norm of components discarded past the window
  int levels = 0;
  Eigen::Index dim_h = 0;
  int dim_p = 0, dim_ps = 0;
};

/// Dense matrix of an operator on the finite window of the first `levels`
/// tail positions. Column layout is h, then tail positions 0..levels-1
/// over D_P, then tail positions 0..levels-1 over D_{P*}; kinds acting on
/// a smaller space use the corresponding sub-layout.
inline TruncatedOperator truncate_to_matrix(const DilationOperator& op, int levels) {
  if (levels < 1) throw std::invalid_argument("truncate_to_matrix: levels must be positive");
  const DilationBlocks& blk = op.blocks();
  const Eigen::Index n = blk.dim_h();
  const int rp = blk.dim_p(), rps = blk.dim_ps();

  bool dom_h = false, dom_p = false, dom_ps = false;
  bool cod_h = false, cod_p = false, cod_ps = false;
  switch (op.kind()) {
    case OperatorKind::v1:
    case OperatorKind::v2:
    case OperatorKind::v3:
      dom_h = dom_p = cod_h = cod_p = true;
      break;
    case OperatorKind::c1:
    case OperatorKind::c2:
    case OperatorKind::c3:
      dom_ps = cod_h = cod_p = true;
      break;
    case OperatorKind::d1:
    case OperatorKind::d2:
    case OperatorKind::d3:
      dom_ps = cod_ps = true;
      break;
    case OperatorKind::r1:
    case OperatorKind::r2:
    case OperatorKind::u:
    case OperatorKind::identity:
      dom_h = dom_p = dom_ps = cod_h = cod_p = cod_ps = true;
      break;
  }

  const Eigen::Index dom_dim =
      (dom_h ? n : 0) + (dom_p ? levels * rp : 0) + (dom_ps ? levels * rps : 0);
  const Eigen::Index cod_dim =
      (cod_h ? n : 0) + (cod_p ? levels * rp : 0) + (cod_ps ? levels * rps : 0);

  auto basis = [&](Eigen::Index j) {
    DilationVector v;
    v.h = ComplexVector::Zero(n);
    Eigen::Index offset = 0;
    if (dom_h) {
      if (j < n) {
        v.h(j) = 1.0;
        return v;
      }
      offset = n;
    }
    if (dom_p) {
      if (j < offset + levels * rp) {
        const Eigen::Index local = j - offset;
        v.tail_p.blocks.assign(static_cast<int>(local / rp) + 1, ComplexVector::Zero(rp));
        v.tail_p.blocks.back()(local % rp) = 1.0;
        return v;
      }
      offset += levels * rp;
    }
    const Eigen::Index local = j - offset;
    v.tail_pstar.blocks.assign(static_cast<int>(local / rps) + 1, ComplexVector::Zero(rps));
    v.tail_pstar.blocks.back()(local % rps) = 1.0;
    return v;
  };

  TruncatedOperator out;
  out.levels = levels;
  out.dim_h = n;
  out.dim_p = rp;
  out.dim_ps = rps;
  out.matrix = ComplexMatrix::Zero(cod_dim, dom_dim);

  for (Eigen::Index j = 0; j < dom_dim; ++j) {
    DilationVector y = op.apply(basis(j));
    double discarded = 0.0;
    Eigen::Index row = 0;
    if (cod_h) {
      out.matrix.block(row, j, n, 1) = y.h;
      row += n;
    }
    if (cod_p) {
      for (int k = 0; k < y.tail_p.support(); ++k) {
        if (k < levels)
          out.matrix.block(row + static_cast<Eigen::Index>(k) * rp, j, rp, 1) = y.tail_p.blocks[k];
        else
          discarded += y.tail_p.blocks[k].squaredNorm();
      }
      row += static_cast<Eigen::Index>(levels) * rp;
    }
    if (cod_ps) {
      for (int k = 0; k < y.tail_pstar.support(); ++k) {
        if (k < levels)
          out.matrix.block(row + static_cast<Eigen::Index>(k) * rps, j, rps, 1) =
              y.tail_pstar.blocks[k];
        else
          discarded += y.tail_pstar.blocks[k].squaredNorm();
      }
    }
    out.edge_defect = std::max(out.edge_defect, std::sqrt(discarded));
  }
  return out;
}

}  // namespace tetra
