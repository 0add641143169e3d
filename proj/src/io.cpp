#include "linimpute/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "linimpute/error.hpp"

namespace linimpute {

namespace {

constexpr char model_magic[8] = {'L', 'I', 'M', 'P', 'M', 'O', 'D', 'L'};
constexpr std::uint32_t model_version = 1;

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
  fail(errc::parse_error, source + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_double(std::string_view s, const std::string& source, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    parse_fail(source, line, "not a finite number: '" + std::string(s) + "'");
  return v;
}

std::int64_t parse_int(std::string_view s, const std::string& source, std::size_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) parse_fail(source, line, "not an integer: '" + std::string(s) + "'");
  return v;
}

void expect_header(std::istream& in, const std::string& source, const std::vector<std::string_view>& expected) {
  std::string line;
  if (!std::getline(in, line)) parse_fail(source, 1, "missing header line");
  const auto tokens = split(line);
  if (tokens != expected) {
    std::string want;
    for (auto t : expected) want += (want.empty() ? "" : " ") + std::string(t);
    parse_fail(source, 1, "header must be '" + want + "'");
  }
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) fail(errc::io_error, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) fail(errc::io_error, "cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) fail(errc::io_error, "write failed for " + path);
}

// Row lookup for tables keyed by SNP id; position must agree with the legend.
class snp_index {
 public:
  explicit snp_index(std::span<const snp_meta> snps) : snps_(snps) {
    for (std::size_t i = 0; i < snps.size(); ++i) index_.emplace(snps[i].id, i);
  }
  std::size_t find(std::string_view id, std::int64_t position, const std::string& source, std::size_t line) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) fail(errc::id_mismatch, source + ":" + std::to_string(line) + ": unknown SNP id " + std::string(id));
    if (snps_[it->second].position != position)
      fail(errc::id_mismatch, source + ":" + std::to_string(line) + ": position of " + std::string(id) +
                                  " disagrees with the legend");
    return it->second;
  }

 private:
  std::span<const snp_meta> snps_;
  std::unordered_map<std::string, std::size_t> index_;
};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& source) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) fail(errc::parse_error, source + ": truncated model file");
  return v;
}

void put_doubles(std::ostream& out, std::span<const double> v) {
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::istream& in, std::size_t n, const std::string& source) {
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) fail(errc::parse_error, source + ": truncated model file");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::vector<snp_meta> read_legend(std::istream& in, const std::string& source) {
  expect_header(in, source, {"id", "position", "allele0", "allele1"});
  std::vector<snp_meta> snps;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = split(line);
    if (t.empty()) continue;
    if (t.size() != 4) parse_fail(source, lineno, "expected 4 fields, found " + std::to_string(t.size()));
    if (t[2].size() != 1 || t[3].size() != 1) parse_fail(source, lineno, "alleles must be single characters");
    snp_meta s{std::string(t[0]), parse_int(t[1], source, lineno), t[2][0], t[3][0]};
    if (!snps.empty() && s.position <= snps.back().position)
      fail(errc::nonmonotone_positions, source + ":" + std::to_string(lineno) + ": positions must be strictly increasing");
    snps.push_back(std::move(s));
  }
  if (snps.empty()) fail(errc::empty_panel, source + ": legend lists no SNPs");
  validate_snps(snps);
  return snps;
}

void write_legend(std::ostream& out, std::span<const snp_meta> snps) {
  out << "id position allele0 allele1\n";
  for (const auto& s : snps) out << s.id << ' ' << s.position << ' ' << s.allele0 << ' ' << s.allele1 << '\n';
}

panel read_panel(std::istream& haps, const std::string& source, std::vector<snp_meta> snps) {
  std::string line;
  if (!std::getline(haps, line)) parse_fail(source, 1, "missing phased=0|1 header");
  const auto head = split(line);
  bool phased;
  if (head.size() == 1 && head[0] == "phased=1")
    phased = true;
  else if (head.size() == 1 && head[0] == "phased=0")
    phased = false;
  else
    parse_fail(source, 1, "header must be phased=0 or phased=1");
  const char max_code = phased ? '1' : '2';
  std::vector<std::int8_t> codes;
  std::size_t rows = 0, snp = 0, lineno = 1;
  while (std::getline(haps, line)) {
    ++lineno;
    const auto t = split(line);
    if (t.empty()) continue;
    if (snp == 0) {
      rows = t.size();
      codes.reserve(rows * snps.size());
    } else if (t.size() != rows) {
      fail(errc::row_count_mismatch, source + ":" + std::to_string(lineno) + ": expected " + std::to_string(rows) +
                                         " codes, found " + std::to_string(t.size()));
    }
    for (auto tok : t) {
      if (tok.size() != 1) parse_fail(source, lineno, "invalid allele code '" + std::string(tok) + "'");
      const char c = tok[0];
      if (c == '.')
        codes.push_back(missing_code);
      else if (c >= '0' && c <= max_code)
        codes.push_back(static_cast<std::int8_t>(c - '0'));
      else
        parse_fail(source, lineno, "invalid allele code '" + std::string(tok) + "'");
    }
    ++snp;
  }
  if (snp != snps.size())
    fail(errc::row_count_mismatch, source + ": " + std::to_string(snp) + " SNP lines but the legend lists " +
                                       std::to_string(snps.size()));
  if (rows < 2) fail(errc::empty_panel, source + ": panel needs at least two rows");
  return panel(std::move(snps), rows, phased, std::move(codes));
}

void write_haps(std::ostream& out, const panel& data) {
  out << "phased=" << (data.phased() ? 1 : 0) << '\n';
  std::string line;
  for (std::size_t j = 0; j < data.snp_count(); ++j) {
    line.clear();
    for (auto c : data.column(j)) {
      if (!line.empty()) line.push_back(' ');
      line.push_back(c == missing_code ? '.' : static_cast<char>('0' + c));
    }
    line.push_back('\n');
    out << line;
  }
}

panel load_panel(const std::string& haps_path, const std::string& legend_path) {
  auto legend = open_in(legend_path);
  std::vector<snp_meta> snps = read_legend(legend, legend_path);
  auto haps = open_in(haps_path);
  return read_panel(haps, haps_path, std::move(snps));
}

void write_panel(const panel& data, const std::string& haps_path, const std::string& legend_path) {
  auto haps = open_out(haps_path);
  write_haps(haps, data);
  finish(haps, haps_path);
  auto legend = open_out(legend_path);
  write_legend(legend, data.snps());
  finish(legend, legend_path);
}

rho_map read_rho_map(std::istream& in, const std::string& source, std::span<const snp_meta> snps) {
  expect_header(in, source, {"id", "position", "cum_rho"});
  std::vector<double> cumulative;
  cumulative.reserve(snps.size());
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = split(line);
    if (t.empty()) continue;
    if (t.size() != 3) parse_fail(source, lineno, "expected 3 fields, found " + std::to_string(t.size()));
    const std::size_t i = cumulative.size();
    if (i >= snps.size() || t[0] != snps[i].id || parse_int(t[1], source, lineno) != snps[i].position)
      fail(errc::id_mismatch, source + ":" + std::to_string(lineno) + ": map row " + std::string(t[0]) +
                                  " does not match legend SNP " + (i < snps.size() ? snps[i].id : std::string("<none>")));
    const double v = parse_double(t[2], source, lineno);
    if (v < 0.0 || (i > 0 && v < cumulative.back()))
      fail(errc::nonmonotone_rho, source + ":" + std::to_string(lineno) + ": cum_rho must be nonnegative and nondecreasing");
    cumulative.push_back(v);
  }
  if (cumulative.size() != snps.size())
    fail(errc::id_mismatch, source + ": map has " + std::to_string(cumulative.size()) + " rows, legend has " +
                                std::to_string(snps.size()));
  return rho_map(std::move(cumulative));
}

void write_rho_map(std::ostream& out, std::span<const snp_meta> snps, const rho_map& rho) {
  if (rho.size() != snps.size()) fail(errc::length_mismatch, "rho map does not match SNP list");
  out << "id position cum_rho\n";
  for (std::size_t i = 0; i < snps.size(); ++i)
    out << snps[i].id << ' ' << snps[i].position << ' ' << format_double(rho.at(i)) << '\n';
}

rho_map load_rho_map(const std::string& path, std::span<const snp_meta> snps) {
  auto in = open_in(path);
  return read_rho_map(in, path, snps);
}

void save_rho_map(const std::string& path, std::span<const snp_meta> snps, const rho_map& rho) {
  auto out = open_out(path);
  write_rho_map(out, snps, rho);
  finish(out, path);
}

void write_model(std::ostream& out, const moment_model& m) {
  const std::size_t p = m.dim();
  if (m.snps.size() != p || m.panel_freq.size() != p || m.sigma.dim() != p)
    fail(errc::dimension_mismatch, "model fields have inconsistent lengths");
  out.write(model_magic, sizeof model_magic);
  put<std::uint32_t>(out, model_version);
  put<std::uint64_t>(out, p);
  put<std::uint64_t>(out, m.panel_size);
  put<double>(out, m.theta);
  put<double>(out, m.sparsity_threshold);
  for (const auto& s : m.snps) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.id.size()));
    out.write(s.id.data(), static_cast<std::streamsize>(s.id.size()));
    put<std::int64_t>(out, s.position);
    put<char>(out, s.allele0);
    put<char>(out, s.allele1);
  }
  put_doubles(out, m.mu);
  put_doubles(out, m.panel_freq);
  put<std::uint64_t>(out, m.sigma.bandwidth());
  put_doubles(out, m.sigma.storage());
}

moment_model read_model(std::istream& in, const std::string& source) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, model_magic, sizeof magic) != 0) fail(errc::parse_error, source + ": not a model file");
  const auto version = get<std::uint32_t>(in, source);
  if (version != model_version)
    fail(errc::parse_error, source + ": unsupported model format version " + std::to_string(version));
  moment_model m;
  const auto p = get<std::uint64_t>(in, source);
  if (p == 0 || p > (std::uint64_t{1} << 32)) fail(errc::parse_error, source + ": implausible SNP count");
  m.panel_size = get<std::uint64_t>(in, source);
  m.theta = get<double>(in, source);
  m.sparsity_threshold = get<double>(in, source);
  m.snps.resize(p);
  for (auto& s : m.snps) {
    const auto len = get<std::uint32_t>(in, source);
    if (len > 4096) fail(errc::parse_error, source + ": implausible SNP id length");
    s.id.resize(len);
    in.read(s.id.data(), len);
    s.position = get<std::int64_t>(in, source);
    s.allele0 = get<char>(in, source);
    s.allele1 = get<char>(in, source);
  }
  m.mu = get_doubles(in, p, source);
  m.panel_freq = get_doubles(in, p, source);
  const auto bandwidth = get<std::uint64_t>(in, source);
  if (bandwidth >= p) fail(errc::parse_error, source + ": bandwidth exceeds dimension");
  m.sigma = banded_spd_matrix::from_storage(p, bandwidth, get_doubles(in, p * (bandwidth + 1), source));
  validate_snps(m.snps);
  return m;
}

void save_model(const std::string& path, const moment_model& model) {
  auto out = open_out(path, std::ios::binary);
  write_model(out, model);
  finish(out, path);
}

moment_model load_model(const std::string& path) {
  auto in = open_in(path, std::ios::binary);
  return read_model(in, path);
}

void write_model_text(std::ostream& out, const moment_model& m) {
  out << "snps\t" << m.dim() << '\n'
      << "panel_size\t" << m.panel_size << '\n'
      << "theta\t" << format_double(m.theta) << '\n'
      << "sparsity_threshold\t" << format_double(m.sparsity_threshold) << '\n'
      << "bandwidth\t" << m.sigma.bandwidth() << '\n';
  out << "id\tposition\tpanel_freq\tmu\n";
  for (std::size_t i = 0; i < m.dim(); ++i)
    out << m.snps[i].id << '\t' << m.snps[i].position << '\t' << format_double(m.panel_freq[i]) << '\t'
        << format_double(m.mu[i]) << '\n';
  out << "i\tj\tsigma\n";
  for (std::size_t i = 0; i < m.dim(); ++i) {
    const std::size_t first = m.sigma.first_column(i);
    auto row = m.sigma.row(i);
    for (std::size_t j = first; j <= i; ++j)
      if (row[j - first] != 0.0 || i == j) out << i << '\t' << j << '\t' << format_double(row[j - first]) << '\n';
  }
}

frequency_vector read_frequency_table(std::istream& in, const std::string& source, std::span<const snp_meta> snps) {
  expect_header(in, source, {"id", "position", "freq"});
  const snp_index index(snps);
  frequency_vector out(snps.size());
  std::vector<std::uint8_t> seen(snps.size(), 0);
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = split(line);
    if (t.empty()) continue;
    if (t.size() != 3) parse_fail(source, lineno, "expected 3 fields, found " + std::to_string(t.size()));
    const std::size_t i = index.find(t[0], parse_int(t[1], source, lineno), source, lineno);
    if (seen[i]++) parse_fail(source, lineno, "duplicate row for " + std::string(t[0]));
    if (t[2] == ".") continue;
    const double v = parse_double(t[2], source, lineno);
    if (v < 0.0 || v > 1.0) parse_fail(source, lineno, "frequency outside [0,1]");
    out.set(i, v);
  }
  return out;
}

void write_frequency_table(std::ostream& out, std::span<const snp_meta> snps, const frequency_vector& freq) {
  if (freq.size() != snps.size()) fail(errc::length_mismatch, "frequency vector does not match SNP list");
  out << "id position freq\n";
  for (std::size_t i = 0; i < snps.size(); ++i)
    out << snps[i].id << ' ' << snps[i].position << ' ' << (freq.typed(i) ? format_double(freq.value(i)) : ".") << '\n';
}

frequency_vector load_frequency_table(const std::string& path, std::span<const snp_meta> snps) {
  auto in = open_in(path);
  return read_frequency_table(in, path, snps);
}

std::vector<std::optional<genotype_freq>> read_genotype_freq_table(std::istream& in, const std::string& source,
                                                                   std::span<const snp_meta> snps) {
  expect_header(in, source, {"id", "position", "p0", "p1", "p2"});
  const snp_index index(snps);
  std::vector<std::optional<genotype_freq>> out(snps.size());
  std::vector<std::uint8_t> seen(snps.size(), 0);
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = split(line);
    if (t.empty()) continue;
    if (t.size() != 5) parse_fail(source, lineno, "expected 5 fields, found " + std::to_string(t.size()));
    const std::size_t i = index.find(t[0], parse_int(t[1], source, lineno), source, lineno);
    if (seen[i]++) parse_fail(source, lineno, "duplicate row for " + std::string(t[0]));
    if (t[2] == "." || t[3] == "." || t[4] == ".") {
      if (!(t[2] == "." && t[3] == "." && t[4] == ".")) parse_fail(source, lineno, "partially missing genotype frequencies");
      continue;
    }
    out[i] = genotype_freq{parse_double(t[2], source, lineno), parse_double(t[3], source, lineno),
                           parse_double(t[4], source, lineno)};
  }
  return out;
}

void write_genotype_freq_table(std::ostream& out, std::span<const snp_meta> snps,
                               std::span<const std::optional<genotype_freq>> freq) {
  if (freq.size() != snps.size()) fail(errc::length_mismatch, "genotype frequencies do not match SNP list");
  out << "id position p0 p1 p2\n";
  for (std::size_t i = 0; i < snps.size(); ++i) {
    out << snps[i].id << ' ' << snps[i].position;
    if (freq[i])
      out << ' ' << format_double(freq[i]->p0) << ' ' << format_double(freq[i]->p1) << ' ' << format_double(freq[i]->p2);
    else
      out << " . . .";
    out << '\n';
  }
}

std::vector<std::optional<genotype_freq>> load_genotype_freq_table(const std::string& path,
                                                                   std::span<const snp_meta> snps) {
  auto in = open_in(path);
  return read_genotype_freq_table(in, path, snps);
}

void write_imputation(std::ostream& out, std::span<const snp_meta> snps, const imputation_result& r) {
  out << "id position mean variance status clamped\n";
  for (std::size_t k = 0; k < r.size(); ++k) {
    const snp_meta& s = snps[r.index[k]];
    out << s.id << ' ' << s.position << ' ' << format_double(r.point[k]) << ' ' << format_double(r.variance[k]) << ' '
        << (r.status[k] == snp_status::typed ? "typed" : "untyped") << ' ' << static_cast<int>(r.clamped[k]) << '\n';
  }
}

}  // namespace linimpute
