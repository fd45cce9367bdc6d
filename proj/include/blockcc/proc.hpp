#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace blockcc {

/// Result of running one child process to completion (or killing it).
struct ProcResult {
    int exit_code = -1;       // valid when !signaled
    int term_signal = 0;      // nonzero when killed by a signal
    bool signaled = false;
    bool timed_out = false;
    std::string out;
    std::string err;

    bool ok() const { return !timed_out && !signaled && exit_code == 0; }
};

/// Run `argv` with stdout/stderr captured. The child is placed in its own
/// process group and the whole group is killed on timeout.
ProcResult run_process(const std::vector<std::string>& argv,
                       std::chrono::milliseconds timeout = std::chrono::milliseconds(60000),
                       const std::optional<std::filesystem::path>& cwd = std::nullopt);

/// mkdtemp-backed scratch directory, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& prefix = "blockcc");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }
    void keep() { keep_ = true; }

  private:
    std::filesystem::path path_;
    bool keep_ = false;
};

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace blockcc
