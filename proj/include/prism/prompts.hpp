#pragma once

#include <string>

namespace prism::prompts {

// Default prompt templates for every model-facing step. Slots use
// {placeholder} / <dataset description> markers and are filled by the
// render_* helpers below.
extern const char* const kFrameDescription;
extern const char* const kLabelGeneration;
extern const char* const kLabelValidation;
extern const char* const kWindowDescription;
extern const char* const kRecursiveMerge;
extern const char* const kFinalIntegration;
extern const char* const kJudgeRubric;

std::string render_frame_description(const std::string& dataset_description);
std::string render_label_generation(const std::string& caption);
std::string render_label_validation(const std::string& label);
std::string render_window_description(const std::string& majority_label,
                                      const std::string& dataset_description);
std::string render_recursive_merge(const std::string& chunk,
                                   const std::string& dataset_description);
std::string render_final_integration(const std::string& summary_text,
                                     const std::string& transcript_text,
                                     const std::string& dataset_description);
std::string render_judge_rubric(const std::string& candidate, const std::string& reference);

}  // namespace prism::prompts
