// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <string>

#include "hrx/decider/discriminator.hpp"
#include "hrx/neural/model.hpp"
#include "hrx/phy/frame.hpp"

namespace hrx::decider {

/// Anything that turns a received grid into LLRs.
class Receiver {
public:
    virtual ~Receiver() = default;
    virtual phy::LlrGrid receive(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame, double noise_var) = 0;
};

/// Refines traditional LLRs (Arch II).
class Enhancer {
public:
    virtual ~Enhancer() = default;
    virtual phy::LlrGrid enhance(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame, double noise_var,
                                 const phy::LlrGrid& traditional) = 0;
};

/// Produces u in [0, 1] from discriminator features.
class Discriminator {
public:
    virtual ~Discriminator() = default;
    virtual const DiscConfig& config() const = 0;
    virtual double u(const nn::Tensor& features) = 0;
};

class TraditionalReceiver : public Receiver {
public:
    phy::LlrGrid receive(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame, double noise_var) override;
};

class NeuralReceiver : public Receiver {
public:
    NeuralReceiver(nn::LayerParams params, neural::NeuralRxConfig config)
        : params_(std::move(params)), config_(config) {}
    phy::LlrGrid receive(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame, double noise_var) override;

private:
    nn::LayerParams params_;
    neural::NeuralRxConfig config_;
};

class NeuralEnhancer : public Enhancer {
public:
    NeuralEnhancer(nn::LayerParams params, neural::NeuralRxConfig config)
        : params_(std::move(params)), config_(config) {}
    phy::LlrGrid enhance(const phy::ResourceGrid& rx_grid, const phy::FrameConfig& frame, double noise_var,
                         const phy::LlrGrid& traditional) override;

private:
    nn::LayerParams params_;
    neural::NeuralRxConfig config_;
};

class NetDiscriminator : public Discriminator {
public:
    NetDiscriminator(nn::LayerParams params, DiscConfig config) : params_(std::move(params)), config_(config) {}
    const DiscConfig& config() const override { return config_; }
    double u(const nn::Tensor& features) override { return disc_u(params_, config_, features); }

private:
    nn::LayerParams params_;
    DiscConfig config_;
};

enum class Arch { I, II, III };
std::string to_string(Arch arch);
Arch parse_arch(const std::string& text);

enum class Route { Neural, Traditional };  // Neural means the enhancer under Arch II
std::string to_string(Route route);

struct Verdict {
    double u = 0.5;
    Route route = Route::Traditional;
    double threshold = 0.5;
};

inline Route route_for(double u, double threshold = 0.5) { return u >= threshold ? Route::Neural : Route::Traditional; }

/// Components used by hybrid_receive; a null pointer means the checkpoint was
/// not loaded.
struct HybridParts {
    Receiver* traditional = nullptr;
    Receiver* neural = nullptr;
    Enhancer* enhancer = nullptr;
    Discriminator* disc = nullptr;
};

struct HybridOutput {
    phy::LlrGrid llrs;
    Verdict verdict;
};

/// I: u from pilots, then exactly one receiver runs.
/// II: traditional first; u from pilots plus traditional LLR rows; enhancer or
///     traditional LLRs.
/// III: neural first; u from pilots plus neural LLR rows; neural LLRs kept or
///      traditional run.
/// Throws LoadError naming the missing component.
HybridOutput hybrid_receive(const phy::ResourceGrid& rx_grid, Arch arch, const HybridParts& parts,
                            const phy::FrameConfig& frame, double noise_var);

struct GenieOutput {
    phy::LlrGrid llrs;
    Route route = Route::Traditional;
    std::size_t neural_errors = 0;
    std::size_t trad_errors = 0;
};

/// Evaluation bound: runs both receivers and keeps the one with fewer uncoded
/// errors (ties go to traditional).
GenieOutput genie_select(const phy::ResourceGrid& rx_grid, std::span<const std::uint8_t> truth,
                         const HybridParts& parts, const phy::FrameConfig& frame, double noise_var);

/// 1 iff the neural side made strictly fewer errors.
inline int selection_label(std::size_t neural_errors, std::size_t trad_errors) {
    return neural_errors < trad_errors ? 1 : 0;
}

}  // namespace hrx::decider
