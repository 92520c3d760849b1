// Regenerates the toy model asset. Usage: make_toy_model [out.json]
#include <fstream>
#include <iostream>

#include "garmfit/toy_model.hpp"

int main(int argc, char** argv) {
  std::string out = argc > 1 ? argv[1] : "assets/toy_model.json";
  try {
    nlohmann::json j = garmfit::build_toy_model_json();
    // loader doubles as validator
    garmfit::load_model_from_json_text(j.dump());
    std::ofstream f(out, std::ios::binary);
    if (!f) {
      std::cerr << "cannot open " << out << " for writing\n";
      return 1;
    }
    f << j.dump(1) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "make_toy_model: " << e.what() << "\n";
    return 2;
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}
