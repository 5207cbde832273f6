#include "critloop/records.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "critloop/errors.hpp"

namespace critloop {
namespace {

using nlohmann::json;

json parse_line(const std::string& line, const std::filesystem::path& path, std::size_t lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": not a JSON object");
  return j;
}

std::string require_string(const json& j, const char* key, const std::filesystem::path& path,
                           std::size_t lineno) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": missing string field '" +
                      key + "'");
  return j.at(key).get<std::string>();
}

template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    fn(line, lineno);
  }
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (const auto& line : lines) out << line << '\n';
}

}  // namespace

SolutionRecord make_solution_record(const ProblemRecord& problem, std::string text,
                                    int sample_index) {
  SolutionRecord record;
  record.problem_id = problem.id;
  record.text = std::move(text);
  record.extracted = extract_boxed(record.text);
  record.correct = record.extracted && math_equal(*record.extracted, problem.answer);
  record.sample_index = sample_index;
  return record;
}

std::vector<ProblemRecord> load_problems(const std::filesystem::path& path) {
  std::vector<ProblemRecord> out;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    const json j = parse_line(line, path, lineno);
    ProblemRecord rec;
    rec.id = require_string(j, "id", path, lineno);
    rec.statement = require_string(j, "statement", path, lineno);
    rec.answer = make_final_answer(require_string(j, "answer", path, lineno));
    rec.source = j.value("source", std::string{});
    if (rec.answer.canonical.empty())
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty answer");
    out.push_back(std::move(rec));
  });
  return out;
}

void save_problems(const std::filesystem::path& path, std::span<const ProblemRecord> problems) {
  std::vector<std::string> lines;
  lines.reserve(problems.size());
  for (const auto& rec : problems) {
    json j;
    j["id"] = rec.id;
    j["statement"] = rec.statement;
    j["answer"] = rec.answer.raw;
    j["source"] = rec.source;
    lines.push_back(j.dump());
  }
  write_lines(path, lines);
}

std::vector<SolutionRecord> load_solutions(const std::filesystem::path& path) {
  std::vector<SolutionRecord> out;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    const json j = parse_line(line, path, lineno);
    SolutionRecord rec;
    rec.problem_id = require_string(j, "problem_id", path, lineno);
    rec.text = require_string(j, "text", path, lineno);
    if (j.contains("extracted") && j.at("extracted").is_string())
      rec.extracted = make_final_answer(j.at("extracted").get<std::string>());
    rec.correct = j.value("correct", false);
    rec.sample_index = j.value("sample_index", 0);
    out.push_back(std::move(rec));
  });
  return out;
}

void save_solutions(const std::filesystem::path& path,
                    std::span<const SolutionRecord> solutions) {
  std::vector<std::string> lines;
  lines.reserve(solutions.size());
  for (const auto& rec : solutions) {
    json j;
    j["problem_id"] = rec.problem_id;
    j["text"] = rec.text;
    j["extracted"] = rec.extracted ? json(rec.extracted->raw) : json(nullptr);
    j["correct"] = rec.correct;
    j["sample_index"] = rec.sample_index;
    lines.push_back(j.dump());
  }
  write_lines(path, lines);
}

}  // namespace critloop
