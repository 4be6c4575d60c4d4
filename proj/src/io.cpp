#include "coherentflow/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include "json.hpp"
#include <sstream>

#include "coherentflow/error.hpp"
#include "coherentflow/text.hpp"

namespace cf {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary ensemble I/O assumes a little-endian host");

constexpr char kMagic[4] = {'C', 'F', 'E', '1'};

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  require(out.good(), ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  require(in.good(), ErrorCode::io_error, "cannot open " + path.string());
  return in;
}

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in, const fs::path& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  require(in.good(), ErrorCode::parse_error, path.string() + ": truncated binary ensemble");
  return value;
}

}  // namespace

void write_ensemble_csv(const Ensemble& ensemble, const fs::path& path) {
  auto out = open_out(path);
  out << "particle_id,step,t";
  for (std::size_t a = 0; a < ensemble.dim(); ++a) out << ",x" << a;
  out << '\n';
  std::string line;
  for (std::size_t p = 0; p < ensemble.particles(); ++p) {
    for (std::size_t s = 0; s < ensemble.steps(); ++s) {
      line = std::to_string(ensemble.ids()[p]);
      line += ',';
      line += std::to_string(s);
      line += ',';
      line += format_double(ensemble.time(s));
      for (std::size_t a = 0; a < ensemble.dim(); ++a) {
        line += ',';
        line += format_double(ensemble.at(p, s, a));
      }
      line += '\n';
      out << line;
    }
  }
  require(out.good(), ErrorCode::io_error, "failed writing " + path.string());
}

Ensemble read_ensemble_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::parse_error,
          path.string() + ": empty file");
  const auto header = split_csv(line);
  require(header.size() >= 4 && header[0] == "particle_id" && header[1] == "step" &&
              header[2] == "t",
          ErrorCode::parse_error, path.string() + ": unexpected header");
  const std::size_t dim = header.size() - 3;

  struct Row {
    std::size_t step;
    double t;
    std::vector<double> x;
  };
  std::vector<std::int64_t> order;
  std::map<std::int64_t, std::vector<Row>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    require(fields.size() == header.size(), ErrorCode::parse_error, where + ": wrong column count");
    const auto id = parse_int(fields[0], where);
    Row row{static_cast<std::size_t>(parse_int(fields[1], where)), parse_double(fields[2], where), {}};
    for (std::size_t a = 0; a < dim; ++a) row.x.push_back(parse_double(fields[3 + a], where));
    auto [it, inserted] = rows.try_emplace(id);
    if (inserted) order.push_back(id);
    it->second.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::parse_error, path.string() + ": no data rows");

  const std::size_t steps = rows.begin()->second.size();
  double t0 = 0.0;
  double dt = 1.0;
  {
    auto first = rows.begin()->second;
    std::sort(first.begin(), first.end(), [](const Row& a, const Row& b) { return a.step < b.step; });
    t0 = first.front().t;
    if (steps > 1) dt = (first.back().t - t0) / static_cast<double>(steps - 1);
  }
  Ensemble ens(order.size(), steps, dim, t0, dt);
  for (std::size_t p = 0; p < order.size(); ++p) {
    auto& track = rows[order[p]];
    require(track.size() == steps, ErrorCode::parse_error,
            path.string() + ": particle " + std::to_string(order[p]) + " has a different step count");
    for (const auto& r : track) {
      require(r.step < steps, ErrorCode::parse_error, path.string() + ": step index out of range");
      for (std::size_t a = 0; a < dim; ++a) ens.at(p, r.step, a) = r.x[a];
    }
  }
  ens.set_ids(order);
  return ens;
}

void write_ensemble_binary(const Ensemble& ensemble, const fs::path& path) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out.write(kMagic, 4);
  put(out, static_cast<std::uint32_t>(ensemble.particles()));
  put(out, static_cast<std::uint32_t>(ensemble.steps()));
  put(out, static_cast<std::uint32_t>(ensemble.dim()));
  put(out, ensemble.t0());
  put(out, ensemble.dt_out());
  out.write(reinterpret_cast<const char*>(ensemble.raw().data()),
            static_cast<std::streamsize>(ensemble.raw().size() * sizeof(double)));
  require(out.good(), ErrorCode::io_error, "failed writing " + path.string());
}

Ensemble read_ensemble_binary(const fs::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  require(in.good() && std::memcmp(magic, kMagic, 4) == 0, ErrorCode::parse_error,
          path.string() + ": not a CFE1 ensemble file");
  const auto n = get<std::uint32_t>(in, path);
  const auto steps = get<std::uint32_t>(in, path);
  const auto dim = get<std::uint32_t>(in, path);
  const auto t0 = get<double>(in, path);
  const auto dt = get<double>(in, path);
  Ensemble ens(n, steps, dim, t0, dt);
  in.read(reinterpret_cast<char*>(ens.raw().data()),
          static_cast<std::streamsize>(ens.raw().size() * sizeof(double)));
  require(in.gcount() == static_cast<std::streamsize>(ens.raw().size() * sizeof(double)),
          ErrorCode::parse_error, path.string() + ": truncated binary ensemble");
  return ens;
}

void write_labels_csv(const Labeling& labels, const std::vector<std::int64_t>& ids,
                      const fs::path& path) {
  require(ids.empty() || ids.size() == labels.size(), ErrorCode::dimension_mismatch,
          "write_labels_csv: id count does not match label count");
  auto out = open_out(path);
  out << "particle_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    out << (ids.empty() ? static_cast<std::int64_t>(i) : ids[i]) << ',' << labels.labels[i] << '\n';
  require(out.good(), ErrorCode::io_error, "failed writing " + path.string());
}

Labeling read_labels_csv(const fs::path& path, const std::vector<std::int64_t>& ids) {
  auto in = open_in(path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && trim(line) == "particle_id,label",
          ErrorCode::parse_error, path.string() + ": expected header particle_id,label");
  std::vector<std::pair<std::int64_t, int>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    require(fields.size() == 2, ErrorCode::parse_error, where + ": expected two columns");
    const auto label = parse_int(fields[1], where);
    require(label >= 0, ErrorCode::parse_error, where + ": negative label");
    rows.emplace_back(parse_int(fields[0], where), static_cast<int>(label));
  }

  Labeling out;
  if (ids.empty()) {
    for (const auto& r : rows) out.labels.push_back(r.second);
  } else {
    std::map<std::int64_t, int> by_id(rows.begin(), rows.end());
    for (auto id : ids) {
      const auto it = by_id.find(id);
      require(it != by_id.end(), ErrorCode::parse_error,
              path.string() + ": no label for particle " + std::to_string(id));
      out.labels.push_back(it->second);
    }
  }
  for (int l : out.labels) out.k = std::max(out.k, l + 1);
  return out;
}

void write_eigenvalue_trace(const DetectionRun& run, const fs::path& path) {
  auto out = open_out(path);
  const Eigen::Index k = run.steps.empty() ? 0 : run.steps.front().eigenvalues.size();
  out << "step,t";
  for (Eigen::Index j = 0; j < k; ++j) out << ",rho2_" << j;
  out << '\n';
  for (const auto& s : run.steps) {
    out << s.step << ',' << format_double(s.t);
    for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j) out << ',' << format_double(s.eigenvalues[j]);
    out << '\n';
  }
}

void write_eigenfunctions(const SpectralResult& spectral, const std::vector<std::int64_t>& ids,
                          const fs::path& path) {
  auto out = open_out(path);
  const auto& f = spectral.eigenfunctions;
  out << "particle_id";
  for (Eigen::Index j = 0; j < f.cols(); ++j) out << ",f" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    out << (ids.empty() ? static_cast<std::int64_t>(i) : ids[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < f.cols(); ++j) out << ',' << format_double(f(i, j));
    out << '\n';
  }
}

std::string score_report_json(const ScoreReport& report) {
  nlohmann::ordered_json j;
  j["method"] = report.method;
  j["environment"] = report.environment;
  j["per_step"] = nlohmann::ordered_json::array();
  for (const auto& s : report.per_step)
    j["per_step"].push_back({{"t", s.t}, {"ri", s.rand_adjusted}, {"h", s.homogeneity},
                             {"c", s.completeness}, {"v", s.v_measure}});
  j["averaged"] = {{"ri", report.averaged.rand_adjusted},
                   {"h", report.averaged.homogeneity},
                   {"c", report.averaged.completeness},
                   {"v", report.averaged.v_measure}};
  return j.dump(2) + "\n";
}

ScoreReport parse_score_report_json(const std::string& text) {
  ScoreReport report;
  try {
    const auto j = nlohmann::json::parse(text);
    report.method = j.at("method").get<std::string>();
    report.environment = j.at("environment").get<std::string>();
    for (const auto& s : j.at("per_step"))
      report.per_step.push_back({s.at("t").get<double>(), s.at("ri").get<double>(),
                                 s.at("h").get<double>(), s.at("c").get<double>(),
                                 s.at("v").get<double>()});
    const auto& a = j.at("averaged");
    report.averaged = {static_cast<double>(report.per_step.size()), a.at("ri").get<double>(),
                       a.at("h").get<double>(), a.at("c").get<double>(), a.at("v").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("score report: ") + e.what());
  }
  return report;
}

std::string score_table(const std::vector<ScoreReport>& reports) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "Environment" << std::setw(10) << "Method" << std::right
      << std::setw(8) << "RI" << std::setw(8) << "H" << std::setw(8) << "V" << '\n';
  out << std::string(50, '-') << '\n';
  out << std::fixed << std::setprecision(3);
  for (const auto& r : reports) {
    std::string method = r.method;
    if (!method.empty()) method[0] = static_cast<char>(std::toupper(method[0]));
    out << std::left << std::setw(16) << r.environment << std::setw(10) << method << std::right
        << std::setw(8) << r.averaged.rand_adjusted << std::setw(8) << r.averaged.homogeneity
        << std::setw(8) << r.averaged.v_measure << '\n';
  }
  return out.str();
}

std::string sha256_file(const fs::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  require(ctx && EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) == 1, ErrorCode::io_error,
          "sha256: digest initialization failed");
  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  require(out.good(), ErrorCode::io_error, "failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace cf
