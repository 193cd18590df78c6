#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "menet/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate a synthetic four-region corpus"};

  std::string output = "synthetic.jsonl";
  menet::SyntheticConfig cfg;
  app.add_option("-o,--output", output, "output JSONL path");
  app.add_option("--users-per-region", cfg.users_per_region, "users in each region");
  app.add_option("--tweets-per-user", cfg.tweets_per_user, "tweets per user");
  app.add_option("--text-corrupt", cfg.text_corrupt, "fraction with off-region vocabulary");
  app.add_option("--mention-corrupt", cfg.mention_corrupt,
                 "fraction mentioning another region");
  app.add_option("--hour-corrupt", cfg.hour_corrupt, "fraction posting at random hours");
  app.add_option("-s,--seed", cfg.seed, "random seed");
  CLI11_PARSE(app, argc, argv);

  try {
    menet::write_synthetic_jsonl(output, cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::printf("wrote %s\n", output.c_str());
  return 0;
}
