#include "ptnet/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ptnet::ad {

namespace {
constexpr const char* kMagic = "ptnet-checkpoint v1";
}

Parameter& ParameterStore::create(const std::string& name, int rows, int cols) {
  if (by_name_.count(name))
    throw ShapeError("duplicate parameter name: " + name);
  params_.push_back(std::make_unique<Parameter>(name, rows, cols));
  by_name_[name] = static_cast<int>(params_.size()) - 1;
  return *params_.back();
}

Parameter& ParameterStore::at(const std::string& name) {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw ShapeError("unknown parameter: " + name);
  return *params_[it->second];
}

const Parameter& ParameterStore::at(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw ShapeError("unknown parameter: " + name);
  return *params_[it->second];
}

bool ParameterStore::contains(const std::string& name) const {
  return by_name_.count(name) > 0;
}

std::vector<Parameter*> ParameterStore::all() {
  std::vector<Parameter*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParameterStore::all() const {
  std::vector<const Parameter*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

int ParameterStore::total_size() const {
  int n = 0;
  for (auto& p : params_) n += p->size();
  return n;
}

void ParameterStore::zero_grads() {
  for (auto& p : params_) p->zero_grad();
}

void ParameterStore::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint: " + path);
  out << kMagic << "\n";
  char buf[40];
  for (const auto& p : params_) {
    out << "param " << p->name << " " << p->rows << " " << p->cols << "\n";
    for (int i = 0; i < p->size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%a", p->value[i]);
      out << buf << (i + 1 == p->size() ? "" : " ");
    }
    out << "\n";
  }
  if (!out) throw Error("failed writing checkpoint: " + path);
}

void ParameterStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw ParseError("bad checkpoint header", 1);
  long line_no = 1;
  int seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream hdr(line);
    std::string tag, name;
    int rows = 0, cols = 0;
    if (!(hdr >> tag >> name >> rows >> cols) || tag != "param")
      throw ParseError("expected 'param <name> <rows> <cols>'", line_no);
    if (!contains(name)) throw ParseError("unknown parameter " + name, line_no);
    Parameter& p = at(name);
    if (p.rows != rows || p.cols != cols)
      throw ParseError("shape mismatch for " + name, line_no);
    if (!std::getline(in, line))
      throw ParseError("missing values for " + name, line_no);
    ++line_no;
    // strtod handles the %a hex-float form; iostream extraction does not.
    std::istringstream vals(line);
    std::string tok;
    for (int i = 0; i < p.size(); ++i) {
      if (!(vals >> tok)) throw ParseError("bad value in " + name, line_no);
      char* end = nullptr;
      p.value[i] = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str()) throw ParseError("bad value in " + name, line_no);
    }
    ++seen;
  }
  if (seen != static_cast<int>(params_.size()))
    throw ParseError("checkpoint is missing parameters", line_no);
}

}  // namespace ptnet::ad
