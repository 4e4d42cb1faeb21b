#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace svcplan {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ConeKind : std::uint8_t { Free, Nonneg, Soc, RSoc };

// Contiguous run of variables belonging to one cone.
struct ConeBlock {
  ConeKind kind = ConeKind::Free;
  int start = 0;
  int dim = 0;
};

struct Triplet {
  int row = 0;
  int col = 0;
  double val = 0.0;

  bool operator==(const Triplet&) const = default;
};

// Standard-form conic program:
//   min c'x   s.t.   A x = rhs,   x_block in cone per block tag,
//                    lo <= x <= hi,   x_i binary where integer_mask[i].
// Blocks partition [0, num_vars). Nonneg/Soc/RSoc membership is carried by
// the block tags; box bounds live in lo/hi (kInf sentinels for none).
struct ConicProgram {
  int num_vars = 0;
  int num_rows = 0;
  std::vector<double> objective;
  std::vector<Triplet> a;  // equality coefficients, sorted (row, col)
  std::vector<double> rhs;
  std::vector<ConeBlock> blocks;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::uint8_t> integer_mask;

  // Throws ValidationError if blocks do not partition the variable vector,
  // a triplet is out of range, or an integer variable is not bounded in [0,1].
  void validate() const;

  // Documented text format, stable across runs for identical programs.
  std::string serialize() const;
};

// Row-major accumulation helper. Coefficients for one (row, col) pair sum.
class ProgramBuilder {
 public:
  int add_var(double lo = -kInf, double hi = kInf);
  int add_nonneg();
  // Appends a cone block of `dim` fresh variables, returns first position.
  int add_cone(ConeKind kind, int dim);

  int add_row(double rhs);
  void coef(int row, int col, double val);
  void obj(int col, double val);
  void mark_integer(int col);
  void set_bounds(int col, double lo, double hi);

  int var_count() const { return static_cast<int>(lo_.size()); }
  int row_count() const { return static_cast<int>(rhs_.size()); }

  ConicProgram finish();

 private:
  void flush_free_run();

  std::vector<double> obj_, lo_, hi_, rhs_;
  std::vector<Triplet> trips_;
  std::vector<ConeBlock> blocks_;
  std::vector<std::uint8_t> integer_;
  int tagged_upto_ = 0;  // vars [0, tagged_upto_) already covered by blocks_
};

}  // namespace svcplan
