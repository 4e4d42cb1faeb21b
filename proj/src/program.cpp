#include "svcplan/program.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "svcplan/errors.hpp"

namespace svcplan {

namespace {

const char* kind_name(ConeKind k) {
  switch (k) {
    case ConeKind::Free: return "free";
    case ConeKind::Nonneg: return "nonneg";
    case ConeKind::Soc: return "soc";
    case ConeKind::RSoc: return "rsoc";
  }
  return "?";
}

std::string fmt(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ConicProgram::validate() const {
  if (static_cast<int>(objective.size()) != num_vars ||
      static_cast<int>(lo.size()) != num_vars ||
      static_cast<int>(hi.size()) != num_vars ||
      static_cast<int>(integer_mask.size()) != num_vars ||
      static_cast<int>(rhs.size()) != num_rows) {
    throw ValidationError("program: inconsistent dimensions");
  }
  int at = 0;
  for (const ConeBlock& b : blocks) {
    if (b.start != at || b.dim <= 0)
      throw ValidationError("program: cone blocks do not partition variables");
    if ((b.kind == ConeKind::Soc && b.dim < 2) ||
        (b.kind == ConeKind::RSoc && b.dim < 3))
      throw ValidationError("program: cone block too small");
    at += b.dim;
  }
  if (at != num_vars)
    throw ValidationError("program: cone blocks do not cover all variables");
  for (const Triplet& t : a) {
    if (t.row < 0 || t.row >= num_rows || t.col < 0 || t.col >= num_vars)
      throw ValidationError("program: coefficient out of range");
    if (!std::isfinite(t.val))
      throw ValidationError("program: non-finite coefficient");
  }
  for (int i = 0; i < num_vars; ++i) {
    if (lo[i] > hi[i]) throw ValidationError("program: crossed bounds");
    if (integer_mask[i] && (lo[i] < 0.0 || hi[i] > 1.0))
      throw ValidationError("program: integer variable not bounded in [0,1]");
  }
}

std::string ConicProgram::serialize() const {
  std::ostringstream os;
  os << "conic-program v1\n";
  os << "vars " << num_vars << " rows " << num_rows << "\n";
  os << "objective\n";
  for (int i = 0; i < num_vars; ++i)
    if (objective[i] != 0.0) os << i << " " << fmt(objective[i]) << "\n";
  os << "equalities\n";
  for (const Triplet& t : a)
    os << t.row << " " << t.col << " " << fmt(t.val) << "\n";
  os << "rhs\n";
  for (int r = 0; r < num_rows; ++r)
    if (rhs[r] != 0.0) os << r << " " << fmt(rhs[r]) << "\n";
  os << "cones\n";
  for (const ConeBlock& b : blocks)
    os << kind_name(b.kind) << " " << b.start << " " << b.dim << "\n";
  os << "bounds\n";
  for (int i = 0; i < num_vars; ++i)
    if (lo[i] != -kInf || hi[i] != kInf)
      os << i << " " << fmt(lo[i]) << " " << fmt(hi[i]) << "\n";
  os << "integers\n";
  for (int i = 0; i < num_vars; ++i)
    if (integer_mask[i]) os << i << "\n";
  os << "end\n";
  return os.str();
}

void ProgramBuilder::flush_free_run() {
  int n = var_count();
  if (tagged_upto_ < n) {
    blocks_.push_back({ConeKind::Free, tagged_upto_, n - tagged_upto_});
    tagged_upto_ = n;
  }
}

int ProgramBuilder::add_var(double lo, double hi) {
  obj_.push_back(0.0);
  lo_.push_back(lo);
  hi_.push_back(hi);
  integer_.push_back(0);
  return var_count() - 1;
}

int ProgramBuilder::add_nonneg() {
  flush_free_run();
  int pos = add_var(0.0, kInf);
  blocks_.push_back({ConeKind::Nonneg, pos, 1});
  tagged_upto_ = pos + 1;
  return pos;
}

int ProgramBuilder::add_cone(ConeKind kind, int dim) {
  flush_free_run();
  int start = var_count();
  for (int i = 0; i < dim; ++i) add_var();
  blocks_.push_back({kind, start, dim});
  tagged_upto_ = start + dim;
  return start;
}

int ProgramBuilder::add_row(double rhs) {
  rhs_.push_back(rhs);
  return row_count() - 1;
}

void ProgramBuilder::coef(int row, int col, double val) {
  if (val != 0.0) trips_.push_back({row, col, val});
}

void ProgramBuilder::obj(int col, double val) { obj_[col] += val; }

void ProgramBuilder::mark_integer(int col) { integer_[col] = 1; }

void ProgramBuilder::set_bounds(int col, double lo, double hi) {
  lo_[col] = lo;
  hi_[col] = hi;
}

ConicProgram ProgramBuilder::finish() {
  flush_free_run();
  ConicProgram p;
  p.num_vars = var_count();
  p.num_rows = row_count();
  p.objective = std::move(obj_);
  p.lo = std::move(lo_);
  p.hi = std::move(hi_);
  p.rhs = std::move(rhs_);
  p.integer_mask = std::move(integer_);
  p.blocks = std::move(blocks_);

  // merge duplicate coefficients, fixed (row, col) order
  std::stable_sort(trips_.begin(), trips_.end(),
                   [](const Triplet& u, const Triplet& v) {
                     return u.row != v.row ? u.row < v.row : u.col < v.col;
                   });
  for (const Triplet& t : trips_) {
    if (!p.a.empty() && p.a.back().row == t.row && p.a.back().col == t.col)
      p.a.back().val += t.val;
    else
      p.a.push_back(t);
  }
  std::erase_if(p.a, [](const Triplet& t) { return t.val == 0.0; });

  p.validate();
  return p;
}

}  // namespace svcplan
