// sfb/semiring.h

// Copyright 2026  The sfb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SFB_SEMIRING_H_
#define SFB_SEMIRING_H_

// Weight types for the three semirings used by the recursions.
//
// |   Type     |   oplus    | otimes | zero | one |
// | Log        | logsumexp  |   +    | -inf |  0  |
// | Tropical   |    max     |   +    | -inf |  0  |
// | Prob       |     +      |   *    |  0   |  1  |
//
// Log and Tropical are semifields over the extended reals; oslash is
// subtraction.  Prob is the ordinary probability semiring; oslash is division.
//
// Every type carries a streaming Accumulator.  Sparse kernels fold their
// terms through it in a fixed order, so a reduction over the same terms in
// the same order always produces the same bits.

#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <string_view>

#include "sfb/errors.h"

namespace sfb {

namespace internal {

template <std::floating_point Real>
constexpr Real kNegInf = -std::numeric_limits<Real>::infinity();

template <std::floating_point Real>
inline Real CheckExtendedReal(Real v, const char *type) {
  if (std::isnan(v))
    throw InvalidWeightError(std::string(type) + ": NaN is not a weight");
  if (v == std::numeric_limits<Real>::infinity())
    throw InvalidWeightError(std::string(type) + ": +inf is not a weight");
  return v;
}

template <std::floating_point Real>
inline Real CheckNonNegative(Real v, const char *type) {
  CheckExtendedReal(v, type);
  if (v < Real(0))
    throw InvalidWeightError(std::string(type) + ": negative value");
  return v;
}

}  // namespace internal

/// Log-probability weight (nats).  -inf is the unique zero.
template <std::floating_point Real>
class LogWeightT {
 public:
  using ValueType = Real;
  static constexpr std::string_view kName = "log";

  /// Default-constructs the zero element.
  constexpr LogWeightT() noexcept : value_(internal::kNegInf<Real>) {}
  explicit LogWeightT(Real v)
      : value_(internal::CheckExtendedReal(v, "LogWeight")) {}

  /// Skips validation; for values produced by semiring arithmetic.
  static constexpr LogWeightT Unchecked(Real v) noexcept {
    LogWeightT w;
    w.value_ = v;
    return w;
  }

  static constexpr LogWeightT zero() noexcept { return LogWeightT(); }
  static constexpr LogWeightT one() noexcept { return Unchecked(Real(0)); }

  constexpr Real value() const noexcept { return value_; }
  constexpr bool is_zero() const noexcept {
    return value_ == internal::kNegInf<Real>;
  }

  friend constexpr bool operator==(LogWeightT, LogWeightT) = default;

  /// Max-shifted running log-sum-exp: one exp per term, one log at the end.
  class Accumulator {
   public:
    void add(LogWeightT w) noexcept {
      const Real v = w.value_;
      if (v == internal::kNegInf<Real>) return;
      if (v <= max_) {
        sum_ += std::exp(v - max_);
      } else {
        sum_ = sum_ * std::exp(max_ - v) + Real(1);
        max_ = v;
      }
    }
    LogWeightT result() const noexcept {
      if (sum_ == Real(0)) return zero();
      return Unchecked(max_ + std::log(sum_));
    }

   private:
    Real max_ = internal::kNegInf<Real>;
    Real sum_ = Real(0);
  };

 private:
  Real value_;
};

/// Max-plus weight.  Same representation as LogWeightT.
template <std::floating_point Real>
class TropicalWeightT {
 public:
  using ValueType = Real;
  static constexpr std::string_view kName = "tropical";

  constexpr TropicalWeightT() noexcept : value_(internal::kNegInf<Real>) {}
  explicit TropicalWeightT(Real v)
      : value_(internal::CheckExtendedReal(v, "TropicalWeight")) {}

  static constexpr TropicalWeightT Unchecked(Real v) noexcept {
    TropicalWeightT w;
    w.value_ = v;
    return w;
  }

  static constexpr TropicalWeightT zero() noexcept { return TropicalWeightT(); }
  static constexpr TropicalWeightT one() noexcept { return Unchecked(Real(0)); }

  constexpr Real value() const noexcept { return value_; }
  constexpr bool is_zero() const noexcept {
    return value_ == internal::kNegInf<Real>;
  }

  friend constexpr bool operator==(TropicalWeightT, TropicalWeightT) = default;

  class Accumulator {
   public:
    void add(TropicalWeightT w) noexcept {
      if (w.value_ > best_) best_ = w.value_;
    }
    TropicalWeightT result() const noexcept { return Unchecked(best_); }

   private:
    Real best_ = internal::kNegInf<Real>;
  };

 private:
  Real value_;
};

/// Plain probability.  Underflows to the zero element on long products.
template <std::floating_point Real>
class ProbWeightT {
 public:
  using ValueType = Real;
  static constexpr std::string_view kName = "prob";

  constexpr ProbWeightT() noexcept : value_(Real(0)) {}
  explicit ProbWeightT(Real v)
      : value_(internal::CheckNonNegative(v, "ProbWeight")) {}

  static constexpr ProbWeightT Unchecked(Real v) noexcept {
    ProbWeightT w;
    w.value_ = v;
    return w;
  }

  static constexpr ProbWeightT zero() noexcept { return ProbWeightT(); }
  static constexpr ProbWeightT one() noexcept { return Unchecked(Real(1)); }

  constexpr Real value() const noexcept { return value_; }
  constexpr bool is_zero() const noexcept { return value_ == Real(0); }

  friend constexpr bool operator==(ProbWeightT, ProbWeightT) = default;

  class Accumulator {
   public:
    void add(ProbWeightT w) noexcept { sum_ += w.value_; }
    ProbWeightT result() const noexcept { return Unchecked(sum_); }

   private:
    Real sum_ = Real(0);
  };

 private:
  Real value_;
};

using LogWeight = LogWeightT<double>;
using TropicalWeight = TropicalWeightT<double>;
using ProbWeight = ProbWeightT<double>;

// ---------------------------------------------------------------- oplus

template <std::floating_point Real>
inline LogWeightT<Real> oplus(LogWeightT<Real> a, LogWeightT<Real> b) noexcept {
  Real hi = a.value(), lo = b.value();
  if (hi < lo) std::swap(hi, lo);
  // Also covers both operands being -inf.
  if (lo == internal::kNegInf<Real>) return LogWeightT<Real>::Unchecked(hi);
  return LogWeightT<Real>::Unchecked(hi + std::log1p(std::exp(lo - hi)));
}

template <std::floating_point Real>
inline constexpr TropicalWeightT<Real> oplus(TropicalWeightT<Real> a,
                                             TropicalWeightT<Real> b) noexcept {
  return a.value() < b.value() ? b : a;
}

template <std::floating_point Real>
inline constexpr ProbWeightT<Real> oplus(ProbWeightT<Real> a,
                                         ProbWeightT<Real> b) noexcept {
  return ProbWeightT<Real>::Unchecked(a.value() + b.value());
}

// --------------------------------------------------------------- otimes

template <std::floating_point Real>
inline constexpr LogWeightT<Real> otimes(LogWeightT<Real> a,
                                         LogWeightT<Real> b) noexcept {
  return LogWeightT<Real>::Unchecked(a.value() + b.value());
}

template <std::floating_point Real>
inline constexpr TropicalWeightT<Real> otimes(TropicalWeightT<Real> a,
                                              TropicalWeightT<Real> b) noexcept {
  return TropicalWeightT<Real>::Unchecked(a.value() + b.value());
}

template <std::floating_point Real>
inline constexpr ProbWeightT<Real> otimes(ProbWeightT<Real> a,
                                          ProbWeightT<Real> b) noexcept {
  return ProbWeightT<Real>::Unchecked(a.value() * b.value());
}

// --------------------------------------------------------------- oslash

template <std::floating_point Real>
inline LogWeightT<Real> oslash(LogWeightT<Real> a, LogWeightT<Real> b) {
  if (b.is_zero()) throw DivisionByZeroError("LogWeight: division by zero element");
  return LogWeightT<Real>::Unchecked(a.value() - b.value());
}

template <std::floating_point Real>
inline TropicalWeightT<Real> oslash(TropicalWeightT<Real> a,
                                    TropicalWeightT<Real> b) {
  if (b.is_zero())
    throw DivisionByZeroError("TropicalWeight: division by zero element");
  return TropicalWeightT<Real>::Unchecked(a.value() - b.value());
}

template <std::floating_point Real>
inline ProbWeightT<Real> oslash(ProbWeightT<Real> a, ProbWeightT<Real> b) {
  if (b.is_zero()) throw DivisionByZeroError("ProbWeight: division by zero element");
  return ProbWeightT<Real>::Unchecked(a.value() / b.value());
}

// ------------------------------------------------------------ concept

template <class W>
concept Semiring = requires(W a, W b, typename W::Accumulator acc) {
  typename W::ValueType;
  { W::zero() } -> std::same_as<W>;
  { W::one() } -> std::same_as<W>;
  { a.value() } -> std::same_as<typename W::ValueType>;
  { a.is_zero() } -> std::same_as<bool>;
  { oplus(a, b) } -> std::same_as<W>;
  { otimes(a, b) } -> std::same_as<W>;
  { oslash(a, b) } -> std::same_as<W>;
  acc.add(a);
  { acc.result() } -> std::same_as<W>;
};

// ------------------------------------------------------- conversion

template <class W>
inline constexpr bool kIsProbDomain = false;
template <std::floating_point Real>
inline constexpr bool kIsProbDomain<ProbWeightT<Real>> = true;

/// Embeds a log-probability into semiring W.  Log and tropical store it
/// as-is; prob exponentiates, and rejects values whose exp overflows.
template <Semiring W>
inline W from_log_prob(typename W::ValueType log_prob) {
  using Real = typename W::ValueType;
  internal::CheckExtendedReal(log_prob, "log-probability");
  if constexpr (kIsProbDomain<W>) {
    if (log_prob > std::log(std::numeric_limits<Real>::max()))
      throw InvalidWeightError("ProbWeight: exp(" + std::to_string(log_prob) +
                               ") overflows");
    return W::Unchecked(std::exp(log_prob));
  } else {
    return W::Unchecked(log_prob);
  }
}

template <Semiring W>
inline typename W::ValueType to_log_prob(W w) noexcept {
  if constexpr (kIsProbDomain<W>) {
    return std::log(w.value());
  } else {
    return w.value();
  }
}

/// Folds a range of weights with the semiring accumulator, in order.
template <Semiring W, class Range>
inline W accumulate(const Range &range) noexcept {
  typename W::Accumulator acc;
  for (const W &w : range) acc.add(w);
  return acc.result();
}

}  // namespace sfb

#endif  // SFB_SEMIRING_H_
