#include "conebill/cli/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <thread>

namespace conebill::cli {

void RunConfig::validate() const {
  auto finite = [](double x, const char* name) {
    if (!std::isfinite(x)) throw UsageError(std::string(name) + " must be finite");
  };
  finite(a, "--a");
  finite(semi_a, "--semi-a");
  finite(semi_b, "--semi-b");
  finite(c1, "--c1");
  finite(c2, "--c2");
  if (command.rfind("elliptic", 0) == 0 && !(semi_a > semi_b && semi_b > 0.0))
    throw UsageError("the elliptic cone needs --semi-a > --semi-b > 0");
  if (command.rfind("spiral", 0) == 0 || command == "replay") {
    const double h = 0.5 * std::numbers::pi;
    if (!(a > -h && a <= h)) throw UsageError("--a must lie in (-pi/2, pi/2]");
  }
  if (command == "elliptic bound" && !(c1 > 0.0 && c2 > 0.0)) throw UsageError("--c1 and --c2 must be positive");
  if (kmax < 2) throw UsageError("--kmax must be at least 2");
  if (count < 1) throw UsageError("--count must be positive");
  if (steps < 1) throw UsageError("--steps must be positive");
  if (points < 1) throw UsageError("--points must be positive");
  if (n < 3 || n > 10) throw UsageError("--n must lie in [3, 10]");
  if (tol && !(*tol > 0.0 && std::isfinite(*tol))) throw UsageError("--tol must be positive");
  if (threads < 1) throw UsageError("thread count must be positive");
}

Json RunConfig::to_json() const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["a"] = a;
  j["semi_a"] = semi_a;
  j["semi_b"] = semi_b;
  j["c1"] = c1;
  j["c2"] = c2;
  j["kmax"] = kmax;
  j["count"] = count;
  j["steps"] = steps;
  j["n"] = n;
  j["points"] = points;
  j["tol"] = tol ? Json(*tol) : Json(nullptr);
  j["seed"] = seed;
  j["format"] = format_name(format);
  return j;
}

RunConfig RunConfig::from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  if (j.value("schema_version", -1) != kSchemaVersion) throw UsageError("unsupported config schema version");
  RunConfig c;
  try {
    c.command = j.at("command").get<std::string>();
    c.a = j.at("a").get<double>();
    c.semi_a = j.at("semi_a").get<double>();
    c.semi_b = j.at("semi_b").get<double>();
    c.c1 = j.at("c1").get<double>();
    c.c2 = j.at("c2").get<double>();
    c.kmax = j.at("kmax").get<long>();
    c.count = j.at("count").get<long>();
    c.steps = j.at("steps").get<long>();
    c.n = j.at("n").get<int>();
    c.points = j.at("points").get<long>();
    if (!j.at("tol").is_null()) c.tol = j.at("tol").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.format = parse_format(j.at("format").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed config: ") + e.what());
  }
  return c;
}

int threads_from_env() {
  const char* env = std::getenv("BILLIARDS_THREADS");
  if (env == nullptr || *env == '\0') {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) throw UsageError("BILLIARDS_THREADS must be an integer in [1, 1024]");
  return static_cast<int>(v);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump(const Json& j, int indent, int depth, std::ostringstream& os) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        dump(it.value(), indent, depth + 1, os);
      }
      os << "\n" << close_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      const bool scalars = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (scalars) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          dump(j[i], indent, depth + 1, os);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        dump(j[i], indent, depth + 1, os);
      }
      os << "\n" << close_pad << "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      os << (std::isfinite(x) ? format_number(x) : "null");
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::ostringstream os;
  dump(j, indent, 0, os);
  os << "\n";
  return os.str();
}

std::string format_name(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw UsageError("--format must be csv or json");
}

}  // namespace conebill::cli
