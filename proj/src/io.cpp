#include "mertens/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "mertens/errors.hpp"

namespace mertens {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string header_field(const std::string& header, std::string_view key) {
  const std::string needle = " " + std::string(key) + "=";
  const std::size_t pos = header.find(needle);
  if (pos == std::string::npos) throw DomainError("matrix dump header lacks " + std::string(key));
  const std::size_t start = pos + needle.size();
  const std::size_t end = header.find(' ', start);
  return header.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

}  // namespace

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_shortest(*v) : std::string("NA");
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw DomainError("malformed number '" + std::string(text) + "'");
  }
  return v;
}

void write_provenance(std::ostream& os, const std::string& config) {
  os << "# config: " << config << '\n' << "# version: " << kVersion << '\n';
}

void write_matrix_dump(std::ostream& os, std::string_view kind, std::uint64_t n,
                       const Matrix& m) {
  os << "# mertens-matrix v1 kind=" << kind << " n=" << n << " dim=" << m.rows() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_shortest(m(i, j));
    }
    os << '\n';
  }
}

MatrixDump read_matrix_dump(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# mertens-matrix v1", 0) != 0) {
    throw DomainError("missing '# mertens-matrix v1' header");
  }
  MatrixDump dump;
  dump.kind = header_field(header, "kind");
  dump.n = static_cast<std::uint64_t>(parse_double(header_field(header, "n")));
  const auto dim = static_cast<std::size_t>(parse_double(header_field(header, "dim")));
  dump.matrix = Matrix(dim, dim);
  std::string line;
  for (std::size_t i = 0; i < dim; ++i) {
    if (!std::getline(is, line)) throw DomainError("matrix dump truncated at row " + std::to_string(i));
    const auto fields = split(line, ',');
    if (fields.size() != dim) throw DomainError("row " + std::to_string(i) + " has wrong width");
    for (std::size_t j = 0; j < dim; ++j) dump.matrix(i, j) = parse_double(fields[j]);
  }
  return dump;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRecord> records,
                     const std::string& config) {
  write_provenance(os, config);
  os << kSweepHeader << '\n';
  for (const auto& rec : records) {
    os << rec.k << ',' << rec.n << ',' << to_string(rec.kind);
    if (!rec.ok()) {
      for (int i = 0; i < 15; ++i) os << ",NA";
      os << ',' << rec.status << '\n';
      continue;
    }
    for (const auto& e : rec.eig) os << ',' << format_optional(e);
    os << ',' << format_shortest(rec.spectral_norm) << ',' << format_shortest(rec.frobenius_norm)
       << ',' << rec.mertens_n << ',' << format_shortest(rec.w_norm_sq) << ','
       << format_optional(rec.bound_rhs) << ',' << format_shortest(rec.norm_over_sqrt_n) << ','
       << format_shortest(rec.norm_over_log_n) << ',' << rec.status << '\n';
  }
}

void write_eigvec_sidecar(std::ostream& os, std::uint64_t n, std::string_view kind,
                          const SpectrumResult& spectrum) {
  const std::size_t count = spectrum.eigenvalues.size();
  os << "# mertens-eigvecs v1 n=" << n << " kind=" << kind << " dim=" << spectrum.dim
     << " count=" << count << '\n';
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t i = 0; i < spectrum.dim; ++i) {
      if (i) os << ',';
      os << format_shortest(spectrum.eigenvectors(i, c));
    }
    os << '\n';
  }
}

void write_kernel_report(std::ostream& os, std::span<const KernelReportRow> rows,
                         const std::string& config) {
  write_provenance(os, config);
  os << kKernelReportHeader << '\n';
  for (const auto& row : rows) {
    os << format_shortest(row.epsilon) << ',' << format_optional(row.delta) << ','
       << format_shortest(row.value) << ',' << format_optional(row.bound) << ','
       << format_shortest(row.two_grid_error) << '\n';
  }
}

void write_fit_curve(std::ostream& os, std::span<const FitSample> samples,
                     const std::string& config) {
  write_provenance(os, config);
  os << "n,overlay,reference_term\n";
  for (const auto& s : samples) {
    os << format_shortest(s.n) << ',' << format_shortest(s.overlay) << ','
       << format_shortest(s.reference_term) << '\n';
  }
}

}  // namespace mertens
