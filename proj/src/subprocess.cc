// Copyright 2026 The mpeval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "absl/strings/str_cat.h"
#include "mpeval/io.h"
#include "mpeval/status.h"
#include "mpeval/sweep.h"

extern char** environ;

namespace mpeval {
namespace {

// Removes the file when it goes out of scope.
class TempFile {
 public:
  TempFile() {
    std::string pattern =
        (std::filesystem::temp_directory_path() / "mpeval-XXXXXX").string();
    const int fd = mkstemp(pattern.data());
    if (fd >= 0) {
      close(fd);
      path_ = pattern;
    }
  }
  ~TempFile() {
    if (!path_.empty()) unlink(path_.c_str());
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  bool ok() const { return !path_.empty(); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

absl::Status Failure(absl::string_view detail) {
  return MakeError(ErrorKind::kProviderFailure, detail);
}

std::string Tail(const std::string& text, std::size_t limit) {
  return text.size() <= limit ? text : text.substr(text.size() - limit);
}

}  // namespace

absl::StatusOr<std::vector<PredictionSet>> SubprocessProvider::Predict(
    absl::string_view label, std::span<const Scene> scenes) {
  if (argv_.empty()) return Failure("no provider command");
  TempFile input;
  TempFile output;
  TempFile errors;
  if (!input.ok() || !output.ok() || !errors.ok()) {
    return Failure("cannot create temporary files");
  }
  std::string payload;
  for (const Scene& s : scenes) absl::StrAppend(&payload, SceneToJsonLine(s), "\n");
  if (const absl::Status st = WriteFile(input.path(), payload); !st.ok()) {
    return Failure(st.message());
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, input.path().c_str(),
                                   O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, output.path().c_str(),
                                   O_WRONLY | O_TRUNC, 0);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, errors.path().c_str(),
                                   O_WRONLY | O_TRUNC, 0);
  std::vector<char*> argv;
  for (const std::string& a : argv_) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  pid_t pid = 0;
  const int spawned =
      posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (spawned != 0) {
    return Failure(absl::StrCat("cannot start ", argv_[0], " (errno ", spawned, ")"));
  }

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_s_);
  int wstatus = 0;
  while (true) {
    const pid_t done = waitpid(pid, &wstatus, WNOHANG);
    if (done == pid) break;
    if (done < 0) return Failure("lost track of the provider process");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &wstatus, 0);
      return Failure(absl::StrCat("provider timed out after ", timeout_s_,
                                  " s on experiment ", label));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (!WIFEXITED(wstatus) || WEXITSTATUS(wstatus) != 0) {
    const absl::StatusOr<std::string> err = ReadFile(errors.path());
    return Failure(absl::StrCat(
        "provider exited abnormally (status ", wstatus, ") on experiment ", label,
        err.ok() && !err->empty() ? absl::StrCat(": ", Tail(*err, 400)) : ""));
  }
  absl::StatusOr<std::string> text = ReadFile(output.path());
  if (!text.ok()) return Failure(text.status().message());
  absl::StatusOr<std::vector<PredictionSet>> predictions = ParsePredictions(*text);
  if (!predictions.ok()) {
    return Failure(absl::StrCat("malformed provider output: ",
                                predictions.status().message()));
  }
  return predictions;
}

}  // namespace mpeval
