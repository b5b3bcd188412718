// Predicts the next 6/52 draw from a CSV history (or a synthetic one) with
// the main-diagonal and moment estimators, printing one line per estimator.
//
//   predict_next [history.csv]

#include <fstream>
#include <iostream>

#include "cdm/cdm.hpp"

int main(int argc, char** argv) {
  const cdm::GameSpec spec = cdm::GameSpec::set_draw(52, 6, "6/52");
  try {
    cdm::DrawHistory history = cdm::synthesize_history(spec, 500, 1);
    if (argc > 1) {
      std::ifstream in(argv[1]);
      if (!in) {
        std::cerr << "cannot open " << argv[1] << '\n';
        return 2;
      }
      history = cdm::parse_history(in, spec);
    }

    std::vector<std::pair<std::string, std::vector<int>>> lines;
    for (auto method : {cdm::Estimator::main_diagonal, cdm::Estimator::mom}) {
      cdm::BacktestConfig cfg;
      cfg.estimator.method = method;
      lines.emplace_back(std::string(cdm::report_label(method)), cdm::predict_next(history, cfg).numbers);
    }
    for (const auto& line : cdm::render_comparison(lines, std::nullopt)) std::cout << line << '\n';
  } catch (const cdm::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
