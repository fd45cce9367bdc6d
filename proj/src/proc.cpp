#include "blockcc/proc.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "blockcc/diag.hpp"

namespace blockcc {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Syntax: return "SyntaxError";
        case ErrorKind::UnsupportedFeature: return "UnsupportedFeature";
        case ErrorKind::UnresolvedLabel: return "UnresolvedLabel";
        case ErrorKind::UnknownType: return "UnknownType";
        case ErrorKind::RecursiveType: return "RecursiveType";
        case ErrorKind::LayoutMissing: return "LayoutMissing";
        case ErrorKind::DuplicateGlobal: return "DuplicateGlobal";
        case ErrorKind::NonComposable: return "NonComposable";
        case ErrorKind::ImmediateOverflow: return "ImmediateOverflow";
        case ErrorKind::UndefinedLabel: return "UndefinedLabel";
        case ErrorKind::DuplicateLabel: return "DuplicateLabel";
        case ErrorKind::Semantic: return "SemanticError";
        case ErrorKind::ExhaustedRetries: return "ExhaustedRetries";
        case ErrorKind::Backend: return "BackendError";
        case ErrorKind::EmptyOutput: return "EmptyOutput";
        case ErrorKind::Extraction: return "ExtractionError";
        case ErrorKind::OracleUnavailable: return "OracleUnavailable";
        case ErrorKind::Harness: return "HarnessFailure";
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::Internal: return "InternalError";
    }
    return "Error";
}

namespace {

// Reads whatever is available; returns false once the write end is closed.
bool drain_fd(int fd, std::string& sink) {
    char buf[4096];
    for (;;) {
        ssize_t n = ::read(fd, buf, sizeof buf);
        if (n > 0) {
            sink.append(buf, static_cast<size_t>(n));
        } else if (n == 0) {
            return false;
        } else if (errno == EINTR) {
            continue;
        } else {
            return errno == EAGAIN;
        }
    }
}

}  // namespace

ProcResult run_process(const std::vector<std::string>& argv,
                       std::chrono::milliseconds timeout,
                       const std::optional<std::filesystem::path>& cwd) {
    ProcResult result;
    if (argv.empty()) fail(ErrorKind::Harness, "empty argv");

    int out_pipe[2], err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        fail(ErrorKind::Harness, "pipe() failed");

    pid_t pid = fork();
    if (pid < 0) fail(ErrorKind::Harness, "fork() failed");

    if (pid == 0) {
        setpgid(0, 0);
        if (cwd) {
            if (chdir(cwd->c_str()) != 0) _exit(127);
        }
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        std::vector<char*> cargv;
        cargv.reserve(argv.size() + 1);
        for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        _exit(127);
    }

    setpgid(pid, pid);
    close(out_pipe[1]);
    close(err_pipe[1]);
    fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
    fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    auto deadline = std::chrono::steady_clock::now() + timeout;
    bool out_open = true, err_open = true;
    while (out_open || err_open) {
        struct pollfd fds[2];
        nfds_t nfds = 0;
        if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
        if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};

        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            result.timed_out = true;
            kill(-pid, SIGKILL);
            break;
        }
        int rc = poll(fds, nfds, static_cast<int>(remaining.count()));
        if (rc < 0 && errno == EINTR) continue;
        if (rc == 0) continue;

        nfds_t i = 0;
        if (out_open) {
            if (fds[i].revents & (POLLIN | POLLHUP | POLLERR))
                out_open = drain_fd(out_pipe[0], result.out);
            ++i;
        }
        if (err_open) {
            if (fds[i].revents & (POLLIN | POLLHUP | POLLERR))
                err_open = drain_fd(err_pipe[0], result.err);
        }
    }
    // Pick up any bytes written between the last poll and the kill.
    drain_fd(out_pipe[0], result.out);
    drain_fd(err_pipe[0], result.err);
    close(out_pipe[0]);
    close(err_pipe[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    if (WIFSIGNALED(status)) {
        result.signaled = true;
        result.term_signal = WTERMSIG(status);
    } else if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    }
    return result;
}

TempDir::TempDir(const std::string& prefix) {
    const char* base = getenv("TMPDIR");
    std::string tmpl = std::string(base ? base : "/tmp") + "/" + prefix + ".XXXXXX";
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) fail(ErrorKind::Harness, "mkdtemp failed for " + tmpl);
    path_ = buf.data();
}

TempDir::~TempDir() {
    if (keep_) return;
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Harness, "cannot write " + path.string());
    out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Harness, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace blockcc
