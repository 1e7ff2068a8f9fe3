#include "glv/report.hpp"

#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include "json.hpp"
#include <set>
#include <sstream>

#include "glv/errors.hpp"

namespace glv {

namespace {

// shortest text that reads back to the same double
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// RFC 4180 quoting when needed.
std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string report_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  auto& in = j["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.inputs) in[k] = v;
  j["predicted"] = number(r.predicted);
  j["measured"] = number(r.measured);
  j["tolerance"] = number(r.tolerance);
  j["pass"] = r.pass;
  auto& ex = j["extras"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.extras) ex[k] = number(v);
  j["artifacts"] = r.artifacts;
  return j.dump();
}

std::string report_csv(const ExperimentReport& r) {
  std::ostringstream head, row;
  bool first = true;
  auto put = [&](const std::string& k, const std::string& v) {
    head << (first ? "" : ",") << cell(k);
    row << (first ? "" : ",") << cell(v);
    first = false;
  };
  put("name", r.name);
  for (const auto& [k, v] : r.inputs) put(k, v);
  put("predicted", num(r.predicted));
  put("measured", num(r.measured));
  put("tolerance", num(r.tolerance));
  put("pass", r.pass ? "true" : "false");
  for (const auto& [k, v] : r.extras) put(k, num(v));
  return head.str() + "\n" + row.str() + "\n";
}

std::string theta_tau_table(const std::vector<ExperimentReport>& reports) {
  std::set<double> taus;
  std::map<int, std::map<double, double>> rows;
  for (const auto& r : reports) {
    if (r.name != "density_sweep") continue;
    const auto k = r.find_extra("kappa"), t = r.find_extra("tau");
    if (!k || !t) continue;
    taus.insert(*t);
    rows[int(*k)][*t] = r.measured;
  }
  std::ostringstream os;
  os << "kappa";
  for (double t : taus) os << ",tau=" << num(t);
  os << "\n";
  for (const auto& [k, m] : rows) {
    os << k;
    for (double t : taus) {
      os << ",";
      if (auto it = m.find(t); it != m.end()) os << num(it->second);
    }
    os << "\n";
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw Error("write failed: " + path.string());
}

std::vector<std::filesystem::path> emit_report(const std::vector<ExperimentReport>& reports,
                                               const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> files;
  std::ostringstream index, jsonl;
  bool sweep = false;
  for (std::size_t q = 0; q < reports.size(); ++q) {
    const auto& r = reports[q];
    char pre[16];
    std::snprintf(pre, sizeof pre, "%03zu_", q);
    const std::string stem = pre + r.name;
    const auto path = dir / (stem + ".csv");
    write_text(path, report_csv(r));
    files.push_back(path);
    index << path.filename().string() << "\n";
    jsonl << report_json(r) << "\n";
    for (const auto& [tname, csv] : r.tables) {
      const auto tp = dir / (stem + "_" + tname + ".csv");
      write_text(tp, csv);
      files.push_back(tp);
    }
    sweep = sweep || r.name == "density_sweep";
  }
  if (sweep) {
    const auto tp = dir / "theta_vs_tau.csv";
    write_text(tp, theta_tau_table(reports));
    files.push_back(tp);
  }
  write_text(dir / "reports.jsonl", jsonl.str());
  write_text(dir / "index.txt", index.str());
  files.push_back(dir / "reports.jsonl");
  files.push_back(dir / "index.txt");

  const auto log = dir / "run.log";
  std::ofstream f(log, std::ios::app);
  if (!f) throw Error("cannot open " + log.string());
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  f << stamp << " reports=" << reports.size() << "\n";
  for (const auto& r : reports)
    f << "  " << r.name << " runtime_s=" << num(r.runtime) << " pass=" << r.pass << "\n";
  return files;
}

}  // namespace glv
