#include "smtlink/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "smtlink/error.hpp"
#include "smtlink/hints.hpp"

namespace smtlink {

const char* to_string(SolverOutcome::Kind k) {
  switch (k) {
    case SolverOutcome::Kind::Unsat: return "unsat";
    case SolverOutcome::Kind::Sat: return "sat";
    case SolverOutcome::Kind::Unknown: return "unknown";
    case SolverOutcome::Kind::SolverError: return "error";
    case SolverOutcome::Kind::Timeout: return "timeout";
  }
  return "";
}

SolverConfig SolverConfig::from_environment() {
  SolverConfig cfg;
  if (const char* env = std::getenv("SMTLINK_SOLVER"); env && *env) {
    auto cmd = split_command(env);
    if (!cmd.empty()) cfg.command = cmd;
  }
  return cfg;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Child {
  pid_t pid = -1;
  int in = -1;
  int out = -1;
  int err = -1;
};

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

Child spawn(const std::vector<std::string>& argv, std::optional<std::size_t> mem_mb) {
  int pin[2], pout[2], perr[2];
  if (::pipe(pin) || ::pipe(pout) || ::pipe(perr)) {
    throw Error(ErrorKind::Contract, std::string("pipe: ") + std::strerror(errno));
  }
  pid_t pid = ::fork();
  if (pid < 0) {
    throw Error(ErrorKind::Contract, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(pin[0], 0);
    ::dup2(pout[1], 1);
    ::dup2(perr[1], 2);
    for (int fd : {pin[0], pin[1], pout[0], pout[1], perr[0], perr[1]}) ::close(fd);
    if (mem_mb) {
      rlimit lim{};
      lim.rlim_cur = lim.rlim_max = static_cast<rlim_t>(*mem_mb) * 1024 * 1024;
      ::setrlimit(RLIMIT_AS, &lim);
    }
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    std::fprintf(stderr, "cannot execute %s: %s\n", args[0], std::strerror(errno));
    ::_exit(127);
  }
  ::close(pin[0]);
  ::close(pout[1]);
  ::close(perr[1]);
  Child c{pid, pin[1], pout[0], perr[0]};
  ::fcntl(c.in, F_SETFL, ::fcntl(c.in, F_GETFL) | O_NONBLOCK);
  return c;
}

std::string first_line(const std::string& text, std::size_t* end = nullptr) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;
    std::string line = text.substr(pos, nl - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    pos = nl + 1;
    if (!line.empty()) {
      if (end) *end = pos;
      return line;
    }
  }
  return {};
}

std::string excerpt(const std::string& s) {
  return s.size() > 2000 ? s.substr(0, 2000) + "..." : s;
}

// One solver session.  In stdin mode the script is sent up to the check,
// and the model request is issued only after a `sat` verdict, so that no
// solver complains about a missing model.
class Session {
 public:
  Session(const SolverConfig& cfg, std::string input, bool interactive)
      : cfg_(cfg), pending_(std::move(input)), interactive_(interactive) {}

  SolverOutcome run(const std::vector<std::string>& argv) {
    auto start = Clock::now();
    auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                std::chrono::duration<double>(cfg_.timeout_seconds));
    signal(SIGPIPE, SIG_IGN);
    Child c = spawn(argv, cfg_.memory_mb);
    bool timed_out = false;
    if (!interactive_) close_fd(c.in);
    while (c.out >= 0 || c.err >= 0) {
      if (interactive_) step_protocol(c);
      std::vector<pollfd> fds;
      if (c.in >= 0 && !pending_.empty()) fds.push_back({c.in, POLLOUT, 0});
      if (c.out >= 0) fds.push_back({c.out, POLLIN, 0});
      if (c.err >= 0) fds.push_back({c.err, POLLIN, 0});
      auto now = Clock::now();
      if (now >= deadline) {
        timed_out = true;
        break;
      }
      int wait_ms = static_cast<int>(
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
      int rc = ::poll(fds.data(), fds.size(), wait_ms);
      if (rc < 0) {
        if (errno == EINTR) continue;
        break;
      }
      for (const auto& p : fds) {
        if (!p.revents) continue;
        if (p.fd == c.in) {
          ssize_t n = ::write(c.in, pending_.data(), pending_.size());
          if (n > 0) {
            pending_.erase(0, static_cast<std::size_t>(n));
          } else if (n < 0 && errno != EAGAIN) {
            pending_.clear();
            close_fd(c.in);
          }
          if (pending_.empty() && close_after_write_) close_fd(c.in);
        } else {
          char buf[8192];
          ssize_t n = ::read(p.fd, buf, sizeof buf);
          if (n <= 0) {
            if (p.fd == c.out) close_fd(c.out); else close_fd(c.err);
          } else if (p.fd == c.out) {
            out_.append(buf, static_cast<std::size_t>(n));
          } else {
            err_.append(buf, static_cast<std::size_t>(n));
          }
        }
      }
    }
    int status = 0;
    if (timed_out) {
      ::kill(c.pid, SIGKILL);
    }
    close_fd(c.in);
    close_fd(c.out);
    close_fd(c.err);
    ::waitpid(c.pid, &status, 0);
    SolverOutcome o;
    o.millis = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    o.stderr_excerpt = excerpt(err_);
    o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    if (timed_out) {
      o.kind = SolverOutcome::Kind::Timeout;
      o.reason = "no answer within " + std::to_string(cfg_.timeout_seconds) + " s";
      return o;
    }
    classify(o);
    return o;
  }

 private:
  void step_protocol(Child& c) {
    if (sent_followup_ || !pending_.empty()) return;
    std::size_t end = 0;
    std::string verdict = first_line(out_, &end);
    if (verdict.empty()) return;
    if (verdict == "sat") {
      pending_ = "(get-model)\n(exit)\n";
    } else if (verdict == "unknown") {
      pending_ = "(get-info :reason-unknown)\n(exit)\n";
    } else {
      pending_ = "(exit)\n";
    }
    sent_followup_ = true;
    close_after_write_ = true;
    (void)c;
  }

  void classify(SolverOutcome& o) {
    std::size_t end = 0;
    std::string verdict = first_line(out_, &end);
    std::string rest = end ? out_.substr(end) : std::string();
    if (verdict == "unsat") {
      // A model request after unsat is answered with an error by some
      // solvers; that is not a failure.
      o.kind = SolverOutcome::Kind::Unsat;
      return;
    }
    if (verdict == "sat") {
      if (rest.find("(error") != std::string::npos) {
        o.kind = SolverOutcome::Kind::SolverError;
        o.reason = "error while printing model: " + excerpt(rest);
        return;
      }
      o.kind = SolverOutcome::Kind::Sat;
      o.model = rest;
      return;
    }
    if (verdict == "unknown") {
      o.kind = SolverOutcome::Kind::Unknown;
      std::string r = first_line(rest);
      o.reason = r.empty() ? "unknown" : r;
      return;
    }
    o.kind = SolverOutcome::Kind::SolverError;
    if (verdict.empty()) {
      o.reason = "no verdict (exit " + std::to_string(o.exit_code) + ")";
    } else {
      o.reason = "malformed verdict: " + excerpt(verdict);
    }
    if (!err_.empty()) o.reason += "; " + excerpt(first_line(err_ + "\n"));
  }

  const SolverConfig& cfg_;
  std::string pending_;
  bool interactive_;
  bool sent_followup_ = false;
  bool close_after_write_ = false;
  std::string out_;
  std::string err_;
};

}  // namespace

SolverOutcome run_solver_text(const std::string& body, const SolverConfig& cfg) {
  if (!(cfg.timeout_seconds > 0)) {
    throw Error(ErrorKind::Contract, "solver timeout must be positive");
  }
  if (cfg.command.empty()) throw Error(ErrorKind::Contract, "empty solver command");
  try {
    if (cfg.input == SolverConfig::Input::Stdin) {
      Session s(cfg, body + "(check-sat)\n", true);
      return s.run(cfg.command);
    }
    char tmpl[] = "/tmp/smtlink-XXXXXX.smt2";
    int fd = ::mkstemps(tmpl, 5);
    if (fd < 0) throw Error(ErrorKind::Contract, "cannot create temp file");
    std::string text = body + "(check-sat)\n(get-model)\n";
    bool ok = ::write(fd, text.data(), text.size()) == static_cast<ssize_t>(text.size());
    ::close(fd);
    SolverOutcome o;
    if (!ok) {
      o.reason = "cannot write temp file";
    } else {
      std::vector<std::string> argv = cfg.command;
      argv.push_back(tmpl);
      Session s(cfg, {}, false);
      o = s.run(argv);
    }
    std::filesystem::remove(tmpl);
    return o;
  } catch (const Error& e) {
    SolverOutcome o;
    o.reason = e.what();
    return o;
  }
}

SolverOutcome run_solver(const SmtScript& script, const SolverConfig& cfg) {
  return run_solver_text(script.body, cfg);
}

}  // namespace smtlink
