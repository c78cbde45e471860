#include "prism/prompts.hpp"

namespace prism::prompts {

namespace {

std::string substitute(std::string text, const std::string& slot, const std::string& value) {
  std::size_t pos;
  while ((pos = text.find(slot)) != std::string::npos) text.replace(pos, slot.size(), value);
  return text;
}

}  // namespace

const char* const kFrameDescription =
    "Explain what is happening in the image. This is a frame from a video of an activity "
    "<dataset description>";

const char* const kLabelGeneration =
    "Extract info from: {VLM_output}\n"
    "Tell me in few words (5–6) by giving a label for the most important details that you "
    "find from the text description of the activity happening in the image.\n"
    "Don't make the label vague like only the heading of the main activity; tell me exactly "
    "what is going on in the image and only give the label in simple words.";

const char* const kLabelValidation =
    "Imagine you are an expert on validating labels. Given this label: {label}, do you think "
    "it is valid to check an image in an important video?\n"
    "For example, is it not useful (like a black screen) or too general (like \"this is a "
    "surgery video\" or \"this is a girl standing\")?\n"
    "I don't want labels that are not useful, say nothing about the image, or are too general.\n"
    "Based on your judgement, return 0 if you think this is unimportant or too general; return "
    "1 if you think it is an important label. Return only a number, nothing else.";

const char* const kWindowDescription =
    "Context: This is a combination of 4 images from a video of an activity spanning "
    "<dataset description>\n"
    "Each small picture represents a step in the sequence:\n"
    "The current major label is '{majority_label}'.\n"
    "- Top-right: Step 2\n"
    "- Top-left: Step 1\n"
    "- Bottom-right: Step 4\n"
    "- Bottom-left: Step 3\n"
    "Provide a detailed description for each of the 4 images.";

const char* const kRecursiveMerge =
    "You are summarizing partial text from a video of an activity spanning "
    "<dataset description>.\n"
    "Try to give a name to this activity (e.g., a lady doing movements could be dancing). Try "
    "to correlate the different activities to speak for one main act or theme.\n"
    "Rewrite the text in a frame-wise, narrative format with transitions between steps:\n\n"
    "{chunk}";

const char* const kFinalIntegration =
    "We have a final summary of video frames:\n\n"
    "{final_summary_text}\n\n"
    "We also have the raw transcript from the entire audio:\n\n"
    "{transcript_text}\n\n"
    "Please produce a unified, cohesive summary of all the steps in the activity happening in "
    "the video, which could be related to one of these: <dataset description>\n"
    "Incorporate relevant information from the audio transcript. If the transcript provides "
    "additional details or clarifications, weave them into the final summary.\n"
    "If the transcript includes extraneous content, omit it.\n"
    "Focus on a coherent storyline of the entire action or activity of the video.";

// Rubric used when a chat backend is asked to act as the summary judge. The
// five axes and the 1-5 scale feed llm_judge_score.
const char* const kJudgeRubric =
    "You are judging the quality of a video summary against a reference description.\n"
    "Reference:\n{reference}\n\n"
    "Candidate summary:\n{candidate}\n\n"
    "Rate the candidate on each axis with an integer from 1 (worst) to 5 (best): "
    "factual_accuracy, detail, specificity, completeness, repetition (5 means no needless "
    "repetition).\n"
    "Reply with a single JSON object containing exactly those five keys and integer values, "
    "nothing else.";

std::string render_frame_description(const std::string& dataset_description) {
  return substitute(kFrameDescription, "<dataset description>", dataset_description);
}

std::string render_label_generation(const std::string& caption) {
  return substitute(kLabelGeneration, "{VLM_output}", caption);
}

std::string render_label_validation(const std::string& label) {
  return substitute(kLabelValidation, "{label}", label);
}

std::string render_window_description(const std::string& majority_label,
                                      const std::string& dataset_description) {
  std::string out = substitute(kWindowDescription, "{majority_label}", majority_label);
  return substitute(std::move(out), "<dataset description>", dataset_description);
}

std::string render_recursive_merge(const std::string& chunk,
                                   const std::string& dataset_description) {
  std::string out = substitute(kRecursiveMerge, "{chunk}", chunk);
  return substitute(std::move(out), "<dataset description>", dataset_description);
}

std::string render_final_integration(const std::string& summary_text,
                                     const std::string& transcript_text,
                                     const std::string& dataset_description) {
  std::string out = substitute(kFinalIntegration, "{final_summary_text}", summary_text);
  out = substitute(std::move(out), "{transcript_text}", transcript_text);
  return substitute(std::move(out), "<dataset description>", dataset_description);
}

std::string render_judge_rubric(const std::string& candidate, const std::string& reference) {
  std::string out = substitute(kJudgeRubric, "{candidate}", candidate);
  return substitute(std::move(out), "{reference}", reference);
}

}  // namespace prism::prompts
