#include "tme/io.hpp"

#include "tme/errors.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace tme {

namespace {

constexpr const char* kTensorMagic = "TME-TENSOR3 v1";
constexpr const char* kFitMagic = "TME-FIT v1";
constexpr const char* kTruthMagic = "TME-TRUTH v1";

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void expect_magic(std::istream& is, const char* magic,
                  const std::string& what) {
  std::string line;
  if (!std::getline(is, line)) {
    throw FileFormatError(what + ": empty input");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != magic) {
    throw FileFormatError(what + ": expected header '" + std::string(magic) +
                          "', got '" + line + "'");
  }
}

double read_value(std::istream& is, const std::string& what) {
  double v;
  if (!(is >> v)) {
    throw FileFormatError(what + ": truncated or malformed numeric data");
  }
  return v;
}

long long read_count(std::istream& is, const std::string& what) {
  long long v;
  if (!(is >> v) || v < 0) {
    throw FileFormatError(what + ": bad count field");
  }
  return v;
}

void expect_eof(std::istream& is, const std::string& what) {
  std::string extra;
  if (is >> extra) {
    throw FileFormatError(what + ": trailing data '" + extra + "'");
  }
}

void expect_section(std::istream& is, const char* name,
                    const std::string& what) {
  std::string tok;
  if (!(is >> tok) || tok != name) {
    throw FileFormatError(what + ": expected section '" + std::string(name) +
                          "', got '" + tok + "'");
  }
}

void write_matrix(std::ostream& os, const char* name, const Mat& m) {
  os << name << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      os << (c ? " " : "") << fmt(m(r, c));
    }
    os << '\n';
  }
}

Mat read_matrix(std::istream& is, const char* name, Eigen::Index rows,
                Eigen::Index cols, const std::string& what) {
  expect_section(is, name, what);
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = read_value(is, what);
    }
  }
  return m;
}

// Tensors are written as the row-major mode-1 unfolding: J lines of K*L
// values each.
void write_tensor_section(std::ostream& os, const char* name,
                          const Tensor3& t) {
  write_matrix(os, name, matricize(t, 1));
}

Tensor3 read_tensor_section(std::istream& is, const char* name, Dims3 dims,
                            const std::string& what) {
  Mat m = read_matrix(is, name, dims.j, 1LL * dims.k * dims.l, what);
  return tensorize(m, 1, dims);
}


std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) {
    throw FileFormatError("cannot open '" + path + "' for writing");
  }
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw FileFormatError("cannot open '" + path + "' for reading");
  }
  return is;
}

}  // namespace

void write_tensor_batch(std::ostream& os, std::span<const Tensor3> batch) {
  if (batch.empty()) {
    throw std::invalid_argument("write_tensor_batch: empty batch");
  }
  const Dims3 d = batch[0].dims();
  os << kTensorMagic << '\n';
  os << d.j << ' ' << d.k << ' ' << d.l << ' ' << batch.size() << '\n';
  for (const Tensor3& t : batch) {
    if (!(t.dims() == d)) {
      throw std::invalid_argument(
          "write_tensor_batch: inconsistent dimensions");
    }
    const Vec& v = t.values();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      os << fmt(v[i]) << ((i + 1) % d.j == 0 ? '\n' : ' ');
    }
  }
}

std::vector<Tensor3> read_tensor_batch(std::istream& is) {
  const std::string what = "tensor batch";
  expect_magic(is, kTensorMagic, what);
  const long long j = read_count(is, what);
  const long long k = read_count(is, what);
  const long long l = read_count(is, what);
  const long long n = read_count(is, what);
  if (j < 1 || k < 1 || l < 1 || n < 1) {
    throw FileFormatError(what + ": dimensions and count must be positive");
  }
  const Dims3 dims{static_cast<int>(j), static_cast<int>(k),
                   static_cast<int>(l)};
  std::vector<Tensor3> out;
  out.reserve(n);
  for (long long i = 0; i < n; ++i) {
    Vec v(dims.count());
    for (Eigen::Index p = 0; p < v.size(); ++p) {
      v[p] = read_value(is, what);
    }
    out.emplace_back(dims, std::move(v));
  }
  expect_eof(is, what);
  return out;
}

void write_tensor_batch(const std::string& path,
                        std::span<const Tensor3> batch) {
  auto os = open_out(path);
  write_tensor_batch(os, batch);
}

std::vector<Tensor3> read_tensor_batch(const std::string& path) {
  auto is = open_in(path);
  return read_tensor_batch(is);
}

void write_fit(std::ostream& os, const TmeFit& fit, long long n_samples,
               bool include_timings) {
  const Dims3 d = fit.design.data_dims();
  const Ranks3 fr = fit.design.fixed_ranks();
  const Ranks3 rr = fit.design.random_ranks();
  os << kFitMagic << '\n';
  os << d.j << ' ' << d.k << ' ' << d.l << ' ' << fr.p << ' ' << fr.q << ' '
     << fr.r << ' ' << rr.p << ' ' << rr.q << ' ' << rr.r << ' ' << n_samples
     << '\n';
  write_tensor_section(os, "F_HAT", fit.f_hat);
  write_matrix(os, "SIGMA_I", fit.total.sigma.matrix());
  write_matrix(os, "PSI_I", fit.total.psi.matrix());
  write_matrix(os, "OMEGA_I", fit.total.omega.matrix());
  write_matrix(os, "SIGMA_E", fit.residual.sigma.matrix());
  write_matrix(os, "PSI_E", fit.residual.psi.matrix());
  write_matrix(os, "OMEGA_E", fit.residual.omega.matrix());
  write_matrix(os, "SIGMA_R", fit.random_fx.sigma.matrix());
  write_matrix(os, "PSI_R", fit.random_fx.psi.matrix());
  write_matrix(os, "OMEGA_R", fit.random_fx.omega.matrix());
  os << "TRACE\n";
  auto put_trace = [&](int loop, const ConvergenceTrace& trace) {
    for (size_t i = 0; i < trace.records.size(); ++i) {
      const TraceRecord& r = trace.records[i];
      os << loop << ',' << (i + 1) << ',' << fmt(r.idx_sigma) << ','
         << fmt(r.idx_psi) << ',' << fmt(r.idx_omega) << ',' << fmt(r.loglik)
         << ',' << fmt(include_timings ? r.seconds : 0.0) << '\n';
    }
  };
  put_trace(1, fit.trace1);
  put_trace(2, fit.trace2);
}

FitFile read_fit(std::istream& is) {
  const std::string what = "fit file";
  expect_magic(is, kFitMagic, what);
  FitFile f;
  f.dims.j = static_cast<int>(read_count(is, what));
  f.dims.k = static_cast<int>(read_count(is, what));
  f.dims.l = static_cast<int>(read_count(is, what));
  f.fixed_ranks.p = static_cast<int>(read_count(is, what));
  f.fixed_ranks.q = static_cast<int>(read_count(is, what));
  f.fixed_ranks.r = static_cast<int>(read_count(is, what));
  f.random_ranks.p = static_cast<int>(read_count(is, what));
  f.random_ranks.q = static_cast<int>(read_count(is, what));
  f.random_ranks.r = static_cast<int>(read_count(is, what));
  f.n_samples = read_count(is, what);
  f.f_hat = read_tensor_section(
      is, "F_HAT", {f.fixed_ranks.p, f.fixed_ranks.q, f.fixed_ranks.r}, what);
  f.sigma_i = read_matrix(is, "SIGMA_I", f.dims.j, f.dims.j, what);
  f.psi_i = read_matrix(is, "PSI_I", f.dims.k, f.dims.k, what);
  f.omega_i = read_matrix(is, "OMEGA_I", f.dims.l, f.dims.l, what);
  f.sigma_e = read_matrix(is, "SIGMA_E", f.dims.j, f.dims.j, what);
  f.psi_e = read_matrix(is, "PSI_E", f.dims.k, f.dims.k, what);
  f.omega_e = read_matrix(is, "OMEGA_E", f.dims.l, f.dims.l, what);
  f.sigma_r = read_matrix(is, "SIGMA_R", f.random_ranks.p, f.random_ranks.p,
                          what);
  f.psi_r = read_matrix(is, "PSI_R", f.random_ranks.q, f.random_ranks.q, what);
  f.omega_r =
      read_matrix(is, "OMEGA_R", f.random_ranks.r, f.random_ranks.r, what);
  expect_section(is, "TRACE", what);
  std::string line;
  std::getline(is, line);  // rest of the TRACE line
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    FitFile::TraceRow row;
    char comma;
    std::istringstream ls(line);
    if (!(ls >> row.loop >> comma >> row.iter >> comma >> row.idx_sigma >>
          comma >> row.idx_psi >> comma >> row.idx_omega >> comma >>
          row.loglik >> comma >> row.seconds)) {
      throw FileFormatError(what + ": malformed trace line '" + line + "'");
    }
    f.trace.push_back(row);
  }
  return f;
}

void write_fit(const std::string& path, const TmeFit& fit, long long n_samples,
               bool include_timings) {
  auto os = open_out(path);
  write_fit(os, fit, n_samples, include_timings);
}

FitFile read_fit(const std::string& path) {
  auto is = open_in(path);
  return read_fit(is);
}

void write_trace_csv(std::ostream& os, const TmeFit& fit,
                     bool include_timings) {
  os << "loop,iter,idx_sigma,idx_psi,idx_omega,loglik,seconds\n";
  auto put = [&](int loop, const ConvergenceTrace& trace) {
    for (size_t i = 0; i < trace.records.size(); ++i) {
      const TraceRecord& r = trace.records[i];
      os << loop << ',' << (i + 1) << ',' << fmt(r.idx_sigma) << ','
         << fmt(r.idx_psi) << ',' << fmt(r.idx_omega) << ',' << fmt(r.loglik)
         << ',' << fmt(include_timings ? r.seconds : 0.0) << '\n';
    }
  };
  put(1, fit.trace1);
  put(2, fit.trace2);
}

void write_truth(std::ostream& os, const SimTruth& truth) {
  const Dims3 d = truth.design.data_dims();
  const Ranks3 fr = truth.design.fixed_ranks();
  const Ranks3 rr = truth.design.random_ranks();
  os << kTruthMagic << '\n';
  os << d.j << ' ' << d.k << ' ' << d.l << ' ' << fr.p << ' ' << fr.q << ' '
     << fr.r << ' ' << rr.p << ' ' << rr.q << ' ' << rr.r << ' '
     << truth.samples.size() << '\n';
  write_matrix(os, "A1", truth.design.a1);
  write_matrix(os, "A2", truth.design.a2);
  write_matrix(os, "A3", truth.design.a3);
  write_matrix(os, "B1", truth.design.b1);
  write_matrix(os, "B2", truth.design.b2);
  write_matrix(os, "B3", truth.design.b3);
  write_tensor_section(os, "F", truth.f);
  write_matrix(os, "SIGMA_R", truth.random_fx.sigma.matrix());
  write_matrix(os, "PSI_R", truth.random_fx.psi.matrix());
  write_matrix(os, "OMEGA_R", truth.random_fx.omega.matrix());
  write_matrix(os, "SIGMA_E", truth.residual.sigma.matrix());
  write_matrix(os, "PSI_E", truth.residual.psi.matrix());
  write_matrix(os, "OMEGA_E", truth.residual.omega.matrix());
}

SimTruth read_truth(std::istream& is) {
  const std::string what = "truth file";
  expect_magic(is, kTruthMagic, what);
  Dims3 d;
  Ranks3 fr, rr;
  d.j = static_cast<int>(read_count(is, what));
  d.k = static_cast<int>(read_count(is, what));
  d.l = static_cast<int>(read_count(is, what));
  fr.p = static_cast<int>(read_count(is, what));
  fr.q = static_cast<int>(read_count(is, what));
  fr.r = static_cast<int>(read_count(is, what));
  rr.p = static_cast<int>(read_count(is, what));
  rr.q = static_cast<int>(read_count(is, what));
  rr.r = static_cast<int>(read_count(is, what));
  read_count(is, what);  // sample count lives in the batch file

  TmeDesign design;
  design.a1 = read_matrix(is, "A1", d.j, fr.p, what);
  design.a2 = read_matrix(is, "A2", d.k, fr.q, what);
  design.a3 = read_matrix(is, "A3", d.l, fr.r, what);
  design.b1 = read_matrix(is, "B1", d.j, rr.p, what);
  design.b2 = read_matrix(is, "B2", d.k, rr.q, what);
  design.b3 = read_matrix(is, "B3", d.l, rr.r, what);
  Tensor3 f = read_tensor_section(is, "F", {fr.p, fr.q, fr.r}, what);
  Mat sr = read_matrix(is, "SIGMA_R", rr.p, rr.p, what);
  Mat pr = read_matrix(is, "PSI_R", rr.q, rr.q, what);
  Mat omr = read_matrix(is, "OMEGA_R", rr.r, rr.r, what);
  Mat se = read_matrix(is, "SIGMA_E", d.j, d.j, what);
  Mat pe = read_matrix(is, "PSI_E", d.k, d.k, what);
  Mat oe = read_matrix(is, "OMEGA_E", d.l, d.l, what);
  expect_eof(is, what);

  SimTruth truth{std::move(design),
                 std::move(f),
                 Tensor3(),
                 CovTriple{SpdMatrix(std::move(sr)), SpdMatrix(std::move(pr)),
                           SpdMatrix(std::move(omr))},
                 CovTriple{SpdMatrix(std::move(se)), SpdMatrix(std::move(pe)),
                           SpdMatrix(std::move(oe))},
                 {}};
  truth.fixed_full = tucker_apply(truth.f, truth.design.a1, truth.design.a2,
                                  truth.design.a3);
  return truth;
}

void write_truth(const std::string& path, const SimTruth& truth) {
  auto os = open_out(path);
  write_truth(os, truth);
}

SimTruth read_truth(const std::string& path) {
  auto is = open_in(path);
  return read_truth(is);
}

}  // namespace tme
