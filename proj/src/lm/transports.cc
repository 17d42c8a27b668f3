#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <future>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "uidthat/common/errors.h"
#include "uidthat/lm/external.h"

namespace uidthat::lm {
namespace {

class HttpTransport : public SidecarTransport {
 public:
  HttpTransport(const std::string& endpoint, std::chrono::milliseconds timeout)
      : endpoint_(endpoint), timeout_(timeout) {
    auto scheme = endpoint.find("://");
    if (scheme == std::string::npos) {
      throw ProviderError("endpoint must look like http://host:port[/path]: " +
                              endpoint,
                          false);
    }
    auto slash = endpoint.find('/', scheme + 3);
    base_ = endpoint.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : endpoint.substr(slash);
  }

  std::string Exchange(const std::string& request_line,
                       const std::string& /*id*/) override {
    httplib::Client client(base_);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(path_, request_line, "application/json");
    if (!res) {
      throw ProviderError("sidecar unreachable at " + endpoint_ + ": " +
                              httplib::to_string(res.error()),
                          true);
    }
    if (res->status != 200) {
      auto body = nlohmann::json::parse(res->body, nullptr, false);
      if (!body.is_discarded() && body.is_object() && body.contains("error")) {
        return res->body;
      }
      throw ProviderError("sidecar returned HTTP " + std::to_string(res->status),
                          res->status >= 500);
    }
    std::string body = res->body;
    while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
    return body;
  }

  std::string Describe() const override { return "http " + endpoint_; }

 private:
  std::string endpoint_;
  std::string base_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

class StdioTransport : public SidecarTransport {
 public:
  StdioTransport(const std::string& command, std::chrono::milliseconds timeout)
      : command_(command), timeout_(timeout) {
    ::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
      throw ProviderError(std::string("pipe: ") + std::strerror(errno), false);
    }
    pid_ = ::fork();
    if (pid_ < 0) throw ProviderError(std::string("fork: ") + std::strerror(errno), false);
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    ::fcntl(write_fd_, F_SETFD, FD_CLOEXEC);
    ::fcntl(read_fd_, F_SETFD, FD_CLOEXEC);
    reader_ = std::thread([this] { ReadLoop(); });
  }

  ~StdioTransport() override {
    {
      std::lock_guard<std::mutex> lock(write_mu_);
      if (write_fd_ >= 0) ::close(write_fd_);
      write_fd_ = -1;
    }
    int status = 0;
    bool exited = false;
    for (int i = 0; i < 100 && !exited; ++i) {
      exited = ::waitpid(pid_, &status, WNOHANG) == pid_;
      if (!exited) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!exited) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    if (reader_.joinable()) reader_.join();
    ::close(read_fd_);
  }

  std::string Exchange(const std::string& request_line,
                       const std::string& id) override {
    std::future<std::string> reply;
    {
      std::lock_guard<std::mutex> lock(pending_mu_);
      if (closed_) throw ProviderError("sidecar process exited: " + command_, true);
      reply = pending_[id].get_future();
    }
    {
      std::lock_guard<std::mutex> lock(write_mu_);
      std::string line = request_line + "\n";
      std::size_t off = 0;
      while (off < line.size()) {
        ssize_t n = ::write(write_fd_, line.data() + off, line.size() - off);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) {
          Forget(id);
          throw ProviderError("write to sidecar failed: " + std::string(std::strerror(errno)), true);
        }
        off += static_cast<std::size_t>(n);
      }
    }
    if (reply.wait_for(timeout_) != std::future_status::ready) {
      Forget(id);
      throw ProviderError("sidecar timed out on request " + id, true);
    }
    return reply.get();
  }

  std::string Describe() const override { return "stdio " + command_; }

 private:
  void Forget(const std::string& id) {
    std::lock_guard<std::mutex> lock(pending_mu_);
    pending_.erase(id);
  }

  void Deliver(const std::string& line) {
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("id") ||
        !obj["id"].is_string()) {
      return;
    }
    std::lock_guard<std::mutex> lock(pending_mu_);
    auto it = pending_.find(obj["id"].get<std::string>());
    if (it == pending_.end()) return;
    it->second.set_value(line);
    pending_.erase(it);
  }

  void ReadLoop() {
    std::string buffer;
    char chunk[4096];
    while (true) {
      ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t nl;
      while ((nl = buffer.find('\n')) != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty()) Deliver(line);
      }
    }
    std::lock_guard<std::mutex> lock(pending_mu_);
    closed_ = true;
    for (auto& [id, promise] : pending_) {
      promise.set_exception(std::make_exception_ptr(
          ProviderError("sidecar process exited: " + command_, true)));
    }
    pending_.clear();
  }

  std::string command_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::mutex write_mu_;
  std::mutex pending_mu_;
  bool closed_ = false;
  std::map<std::string, std::promise<std::string>> pending_;
  std::thread reader_;
};

}  // namespace

std::unique_ptr<SidecarTransport> MakeHttpTransport(
    const std::string& endpoint, std::chrono::milliseconds timeout) {
  return std::make_unique<HttpTransport>(endpoint, timeout);
}

std::unique_ptr<SidecarTransport> MakeStdioTransport(
    const std::string& command, std::chrono::milliseconds timeout) {
  return std::make_unique<StdioTransport>(command, timeout);
}

}  // namespace uidthat::lm
