#include "mbr/highs_backend.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <limits>

#include "json.hpp"

namespace mbr {

using nlohmann::json;

// Row bounds cross the JSON pipe as +-1e30 (JSON has no infinity literal).
static constexpr double kBoundInf = 1e30;

extern const char* kHighsWorkerScript;  // generated from tools/highs_worker.py

namespace {

// Writes the worker script into a private temp file once per process.
const std::string& worker_script_path() {
  static const std::string path = [] {
    char tmpl[] = "/tmp/mbr_highs_worker_XXXXXX";
    int fd = ::mkstemp(tmpl);
    if (fd < 0) throw BackendError("cannot create worker script temp file");
    const char* src = kHighsWorkerScript;
    size_t len = std::strlen(src);
    size_t off = 0;
    while (off < len) {
      ssize_t w = ::write(fd, src + off, len - off);
      if (w < 0) {
        ::close(fd);
        throw BackendError("cannot write worker script");
      }
      off += static_cast<size_t>(w);
    }
    ::close(fd);
    return std::string(tmpl);
  }();
  return path;
}

}  // namespace

struct HighsSubprocessBackend::Process {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;

  Process() {
    int in_pipe[2], out_pipe[2];
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0)
      throw BackendError("pipe() failed for solver worker");
    pid = ::fork();
    if (pid < 0) throw BackendError("fork() failed for solver worker");
    if (pid == 0) {
      ::dup2(in_pipe[0], STDIN_FILENO);
      ::dup2(out_pipe[1], STDOUT_FILENO);
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      ::close(out_pipe[0]);
      ::close(out_pipe[1]);
      ::execlp("python3", "python3", worker_script_path().c_str(),
               static_cast<char*>(nullptr));
      std::perror("execlp python3");
      _exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child = in_pipe[1];
    from_child = out_pipe[0];
  }

  ~Process() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    if (pid > 0) {
      int status = 0;
      for (int i = 0; i < 200; ++i) {
        if (::waitpid(pid, &status, WNOHANG) == pid) return;
        ::usleep(10000);
      }
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
    }
  }

  void send_line(const std::string& line) {
    std::string msg = line + "\n";
    size_t off = 0;
    while (off < msg.size()) {
      ssize_t w = ::write(to_child, msg.data() + off, msg.size() - off);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw BackendError("solver worker pipe closed while writing");
      }
      off += static_cast<size_t>(w);
    }
  }

  std::string read_line() {
    for (;;) {
      auto nl = buffer.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        return line;
      }
      char chunk[1 << 16];
      ssize_t n = ::read(from_child, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw BackendError("solver worker pipe read error");
      }
      if (n == 0) throw BackendError("solver worker terminated unexpectedly");
      buffer.append(chunk, static_cast<size_t>(n));
    }
  }
};

HighsSubprocessBackend::HighsSubprocessBackend()
    : proc_(std::make_unique<Process>()) {
  json resp = json::parse(exchange(R"({"op":"ping"})"));
  if (resp.value("status", "") != "ok")
    throw BackendError("solver worker failed to start: " + resp.dump());
}

HighsSubprocessBackend::~HighsSubprocessBackend() {
  try {
    proc_->send_line(R"({"op":"quit"})");
    proc_->read_line();
  } catch (...) {
    // worker already gone; Process teardown reaps it
  }
}

std::string HighsSubprocessBackend::exchange(const std::string& request) {
  proc_->send_line(request);
  return proc_->read_line();
}

int HighsSubprocessBackend::add_binary() {
  p_lb_.push_back(0);
  p_ub_.push_back(1);
  p_int_.push_back(true);
  return num_vars_++;
}

int HighsSubprocessBackend::add_continuous(double lb, double ub) {
  p_lb_.push_back(lb);
  p_ub_.push_back(ub);
  p_int_.push_back(false);
  return num_vars_++;
}

void HighsSubprocessBackend::add_constraint(const LinearConstraint& c) {
  double lo = -kBoundInf, hi = kBoundInf;
  switch (c.sense) {
    case Sense::LE: hi = c.rhs; break;
    case Sense::GE: lo = c.rhs; break;
    case Sense::EQ: lo = hi = c.rhs; break;
  }
  p_row_starts_.push_back(static_cast<int>(p_row_index_.size()));
  for (auto [var, coef] : c.terms) {
    if (var < 0 || var >= num_vars_)
      throw BackendError("constraint references unknown variable: " + c.tag);
    p_row_index_.push_back(var);
    p_row_value_.push_back(coef);
  }
  p_row_lo_.push_back(lo);
  p_row_hi_.push_back(hi);
}

void HighsSubprocessBackend::set_objective(
    const std::vector<std::pair<int, double>>& terms, double offset) {
  std::map<int, double> next;
  for (auto [var, coef] : terms) next[var] += coef;
  cost_delta_.clear();
  for (auto& [var, coef] : costs_) cost_delta_[var] = 0.0;  // reset stale
  for (auto& [var, coef] : next) cost_delta_[var] = coef;
  costs_ = std::move(next);
  obj_offset_ = offset;
  obj_dirty_ = true;
}

void HighsSubprocessBackend::suggest_solution(const std::vector<double>& v) {
  warm_ = v;
}

std::string HighsSubprocessBackend::flush_payload() const {
  json req;
  json cols;
  cols["lb"] = p_lb_;
  cols["ub"] = p_ub_;
  cols["obj"] = std::vector<double>(p_lb_.size(), 0.0);
  cols["integer"] = std::vector<int>(p_int_.begin(), p_int_.end());
  req["cols"] = cols;
  json rows;
  rows["lower"] = p_row_lo_;
  rows["upper"] = p_row_hi_;
  rows["starts"] = p_row_starts_;
  rows["index"] = p_row_index_;
  rows["value"] = p_row_value_;
  req["rows"] = rows;
  if (obj_dirty_) {
    json obj;
    std::vector<int> oi;
    std::vector<double> ov;
    for (auto& [var, coef] : cost_delta_) {
      oi.push_back(var);
      ov.push_back(coef);
    }
    obj["index"] = oi;
    obj["value"] = ov;
    obj["offset"] = obj_offset_;
    req["obj"] = obj;
  } else {
    req["obj"] = nullptr;
  }
  return req.dump();
}

void HighsSubprocessBackend::clear_pending() {
  p_lb_.clear();
  p_ub_.clear();
  p_int_.clear();
  p_row_lo_.clear();
  p_row_hi_.clear();
  p_row_starts_.clear();
  p_row_index_.clear();
  p_row_value_.clear();
  cost_delta_.clear();
  obj_dirty_ = false;
  warm_.clear();
}

SolveOutcome HighsSubprocessBackend::solve(double gap_abs,
                                           double time_limit_s) {
  json req = json::parse(flush_payload());
  req["op"] = "solve";
  req["gap_abs"] = gap_abs;
  req["time_limit"] = time_limit_s;
  if (!warm_.empty() && static_cast<int>(warm_.size()) == num_vars_)
    req["warm"] = warm_;
  else
    req["warm"] = nullptr;
  json resp = json::parse(exchange(req.dump()));
  clear_pending();

  const std::string status = resp.value("status", "error");
  SolveOutcome out;
  if (status == "optimal")
    out.status = SolveStatus::Optimal;
  else if (status == "infeasible")
    return out;  // Infeasible, no values
  else if (status == "timelimit")
    out.status = SolveStatus::TimeLimit;
  else
    throw BackendError("solver worker error: " + resp.value("msg", "?"));

  if (resp.contains("values") && resp["values"].is_array()) {
    out.has_values = true;
    out.values = resp["values"].get<std::vector<double>>();
    out.objective = resp.value("objective", 0.0);
    out.best_bound = resp.value("bound", out.objective);
  }
  if (out.status == SolveStatus::Optimal && !out.has_values &&
      num_vars_ > 0)
    throw BackendError("optimal status without a solution vector");
  return out;
}

BackendCapabilities HighsSubprocessBackend::capabilities() const {
  return {.supports_warm_start = true,
          .supports_abs_gap = true,
          .max_vars = 10'000'000};
}

void HighsSubprocessBackend::write_model_lp(const std::string& path) {
  json req = json::parse(flush_payload());
  req["op"] = "write";
  req["path"] = path;
  json resp = json::parse(exchange(req.dump()));
  clear_pending();
  if (resp.value("status", "") != "ok")
    throw BackendError("model export failed: " + resp.value("msg", "?"));
}

}  // namespace mbr
