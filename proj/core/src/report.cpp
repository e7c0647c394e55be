#include "fnt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fnt/error.hpp"
#include "fnt/vocab.hpp"

namespace fnt {

using nlohmann::json;

ReportFormat parse_report_format(std::string_view name) {
  if (name == "tsv") return ReportFormat::Tsv;
  if (name == "table" || name == "human") return ReportFormat::HumanTable;
  throw ConfigError("unknown report format '" + std::string(name) + "' (expected tsv|table)");
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * fraction);
  return buf;
}

namespace {

std::string render_tsv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << "model\tclassifier\tacc\tmicro_f1\n";
  for (const auto& r : rows)
    os << r.model << '\t' << r.classifier << '\t' << format_percent(r.report.acc) << '\t'
       << format_percent(r.report.micro_f1) << '\n';
  return os.str();
}

std::string render_table(const std::vector<ReportRow>& rows) {
  std::vector<std::string> models, classifiers;
  std::map<std::pair<std::string, std::string>, const EvalReport*> cell;
  for (const auto& r : rows) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
    if (std::find(classifiers.begin(), classifiers.end(), r.classifier) == classifiers.end())
      classifiers.push_back(r.classifier);
    cell[{r.model, r.classifier}] = &r.report;
  }
  // Column maxima compare the printed (rounded) values so ties are marked alike.
  std::map<std::string, std::pair<std::string, std::string>> best;
  for (const auto& c : classifiers) {
    double acc = -1, f1 = -1;
    for (const auto& m : models)
      if (auto it = cell.find({m, c}); it != cell.end()) {
        acc = std::max(acc, std::stod(format_percent(it->second->acc)));
        f1 = std::max(f1, std::stod(format_percent(it->second->micro_f1)));
      }
    best[c] = {format_percent(acc / 100.0), format_percent(f1 / 100.0)};
  }

  std::size_t name_width = 5;
  for (const auto& m : models) name_width = std::max(name_width, m.size());
  std::ostringstream os;
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  os << std::string(name_width, ' ');
  for (const auto& c : classifiers) os << " | " << pad(c + " ACC", 9) << ' ' << pad(c + " F1", 9);
  os << '\n';
  for (const auto& m : models) {
    os << m << std::string(name_width - m.size(), ' ');
    for (const auto& c : classifiers) {
      auto it = cell.find({m, c});
      if (it == cell.end()) {
        os << " | " << pad("-", 9) << ' ' << pad("-", 9);
        continue;
      }
      auto acc = format_percent(it->second->acc);
      auto f1 = format_percent(it->second->micro_f1);
      if (acc == best[c].first) acc += '*';
      if (f1 == best[c].second) f1 += '*';
      os << " | " << pad(acc, 9) << ' ' << pad(f1, 9);
    }
    os << '\n';
  }
  return os.str();
}

json to_json(const ConfusionCounts& c) { return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}}; }

ConfusionCounts counts_from_json(const json& j) {
  return {j.at("tp").get<std::uint64_t>(), j.at("fp").get<std::uint64_t>(), j.at("fn").get<std::uint64_t>()};
}

}  // namespace

std::string render_report(const std::vector<ReportRow>& rows, ReportFormat format) {
  if (rows.empty()) throw ConfigError("nothing to report");
  return format == ReportFormat::Tsv ? render_tsv(rows) : render_table(rows);
}

std::filesystem::path breakdown_path(const std::filesystem::path& report_path, const ReportRow& row) {
  auto name = report_path.stem().string() + "." + row.model + "." + to_lower_ascii(row.classifier) +
              ".breakdown.csv";
  return report_path.parent_path() / name;
}

std::string render_breakdown_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "n,group_size,micro_f1\n";
  char buf[32];
  for (const auto& g : report.per_n_breakdown) {
    std::snprintf(buf, sizeof buf, "%.6f", g.micro_f1);
    os << g.n << ',' << g.size << ',' << buf << '\n';
  }
  return os.str();
}

void emit_report(const std::vector<ReportRow>& rows, const std::filesystem::path& path, ReportFormat format) {
  auto text = render_report(rows, format);
  auto write = [](const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << content;
    if (!out) throw IoError("error while writing " + p.string());
  };
  write(path, text);
  if (format == ReportFormat::Tsv)
    for (const auto& r : rows) write(breakdown_path(path, r), render_breakdown_csv(r.report));
}

void save_results(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
  json j = json::array();
  for (const auto& r : rows) {
    json groups = json::array();
    for (const auto& g : r.report.per_n_breakdown)
      groups.push_back({{"n", g.n}, {"size", g.size}, {"counts", to_json(g.counts)}, {"micro_f1", g.micro_f1}});
    j.push_back({{"model", r.model},
                 {"classifier", r.classifier},
                 {"acc", r.report.acc},
                 {"micro_f1", r.report.micro_f1},
                 {"counts", to_json(r.report.counts)},
                 {"examples", r.report.examples},
                 {"excluded_names", r.report.excluded_names},
                 {"per_n_breakdown", groups}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("error while writing " + path.string());
}

std::vector<ReportRow> load_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<ReportRow> rows;
  try {
    auto j = json::parse(in);
    for (const auto& e : j) {
      ReportRow r;
      r.model = e.at("model").get<std::string>();
      r.classifier = e.at("classifier").get<std::string>();
      r.report.acc = e.at("acc").get<double>();
      r.report.micro_f1 = e.at("micro_f1").get<double>();
      r.report.counts = counts_from_json(e.at("counts"));
      r.report.examples = e.at("examples").get<std::size_t>();
      r.report.excluded_names = e.at("excluded_names").get<std::size_t>();
      for (const auto& g : e.at("per_n_breakdown")) {
        r.report.per_n_breakdown.push_back({g.at("n").get<std::size_t>(), g.at("size").get<std::size_t>(),
                                            counts_from_json(g.at("counts")), g.at("micro_f1").get<double>()});
      }
      rows.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw FormatError("malformed results file " + path.string() + ": " + e.what());
  }
  return rows;
}

}  // namespace fnt
