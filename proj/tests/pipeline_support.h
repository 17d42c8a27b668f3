#ifndef UIDTHAT_TESTS_PIPELINE_SUPPORT_H_
#define UIDTHAT_TESTS_PIPELINE_SUPPORT_H_

#include <atomic>
#include <filesystem>
#include <map>
#include <string>
#include <unistd.h>

#include "test_support.h"
#include "uidthat/pipeline/config.h"

namespace uidthat::testing {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("uidthat_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

// Settings used for the shipped oracle tables.
inline pipeline::PipelineConfig FixtureConfig(const std::string& output_dir) {
  pipeline::PipelineConfig c;
  c.corpus = FixturePath("gold_corpus.jsonl").string();
  c.output_dir = output_dir;
  c.seed = 7;
  c.jobs = 2;
  c.provider.ngram.order = 2;
  c.provider.ngram.smoothing_k = 0.01;
  c.provider.ngram.min_count = 2;
  c.fit_scopes = {"all", "think"};
  c.regression.fit.ridge = 1.0;
  c.report.annotation_sample_size = 8;
  return c;
}

// Every regular file below `dir`, keyed by relative path.
inline std::map<std::string, std::string> DirectoryContents(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      out[std::filesystem::relative(entry.path(), dir).string()] = ReadFile(entry.path());
    }
  }
  return out;
}

}  // namespace uidthat::testing

#endif  // UIDTHAT_TESTS_PIPELINE_SUPPORT_H_
