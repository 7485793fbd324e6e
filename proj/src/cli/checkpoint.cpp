#include "mixlab/cli/checkpoint.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "mixlab/cli/table_io.hpp"
#include "mixlab/errors.hpp"

namespace mixlab::cli {

namespace {

void write_tensor(std::ostream& out, const std::string& name,
                  const Eigen::MatrixXd& tensor) {
    out << name << ' ' << tensor.rows() << ' ' << tensor.cols();
    for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
        for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
            out << ' ' << format_real(tensor(r, c));
        }
    }
    out << '\n';
}

void write_net(std::ostream& out, const std::string& prefix,
               const MlpParams& net) {
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        write_tensor(out, prefix + "." + std::to_string(i) + ".W",
                     net.layers[i].weight);
        write_tensor(out, prefix + "." + std::to_string(i) + ".b",
                     net.layers[i].bias);
    }
}

} // namespace

void save_checkpoint(const std::string& path, const MlpParams& phi,
                     const MlpParams& theta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    write_net(out, "enc", phi);
    write_net(out, "dec", theta);
}

std::pair<MlpParams, MlpParams> load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open checkpoint: " + path);

    std::map<std::string, Eigen::MatrixXd> tensors;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string name;
        Eigen::Index rows = 0, cols = 0;
        if (!(row >> name >> rows >> cols) || rows < 1 || cols < 1) {
            throw IoError("malformed checkpoint record: " + line.substr(0, 40));
        }
        Eigen::MatrixXd tensor(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                if (!(row >> tensor(r, c))) {
                    throw IoError("checkpoint record " + name +
                                  " has too few values");
                }
            }
        }
        tensors[name] = std::move(tensor);
    }

    auto read_net = [&tensors](const std::string& prefix) {
        MlpParams net;
        for (std::size_t i = 0;; ++i) {
            const std::string w_name = prefix + "." + std::to_string(i) + ".W";
            const std::string b_name = prefix + "." + std::to_string(i) + ".b";
            const auto w_it = tensors.find(w_name);
            if (w_it == tensors.end()) break;
            const auto b_it = tensors.find(b_name);
            if (b_it == tensors.end()) {
                throw IoError("checkpoint is missing " + b_name);
            }
            net.layers.push_back(
                MlpLayer{w_it->second, b_it->second.col(0)});
        }
        if (net.layers.empty()) {
            throw IoError("checkpoint has no layers with prefix " + prefix);
        }
        net.validate();
        return net;
    };
    return {read_net("enc"), read_net("dec")};
}

} // namespace mixlab::cli
