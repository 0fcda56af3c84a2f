// Copyright 2026 The Caption Authors
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

#include "caption/labelgen.hpp"

#include <gtest/gtest.h>

#include "caption/config.hpp"
#include "caption/evalkit.hpp"
#include "test_util.hpp"

namespace caption {
namespace {

const std::map<std::string, ButtonSample>& corpus_samples() {
  static const auto samples = [] {
    std::map<std::string, ButtonSample> out;
    for (ButtonSample& s : eligible_samples(parse_dataset(testing::kCorpus / "manifest.json"))) {
      out.emplace(s.sample_id, std::move(s));
    }
    return out;
  }();
  return samples;
}

const ButtonSample& corpus_sample(const std::string& id) { return corpus_samples().at("fixture-apps:" + id); }

struct Replay {
  Replay() : store(testing::kCorpus / "transcripts"), client(ClientMode::Replay, &store, nullptr),
             generator(PromptTemplates::load(bundled_prompts_dir()), GenerationConfig{}, client) {}
  TranscriptStore store;
  LlmClient client;
  LabelGenerator generator;
};

class FixedProvider final : public LlmProvider {
 public:
  explicit FixedProvider(std::string reply) : reply_(std::move(reply)) {}
  std::string generate(const PromptRequest&) override { return reply_; }

 private:
  std::string reply_;
};

TEST(Postprocess, Examples) {
  EXPECT_EQ(postprocess_label("\"Customize theme\"\n"), "Customize theme");
  EXPECT_EQ(postprocess_label("enter code manually."), "Enter code manually");
  EXPECT_CAPTION_ERROR(postprocess_label("Back button"), Errc::RedundantWord);
}

TEST(Postprocess, StripsWrappersAndWhitespace) {
  EXPECT_EQ(postprocess_label("  **Adjust   amplifier**  "), "Adjust amplifier");
  EXPECT_EQ(postprocess_label("`open\tmenu`..."), "Open menu");
  EXPECT_EQ(postprocess_label("“Share photo.”"), "Share photo");
  EXPECT_EQ(postprocess_label("- scan code"), "Scan code");
  EXPECT_EQ(postprocess_label("'\"Search\"'"), "Search");
}

TEST(Postprocess, Rejections) {
  EXPECT_CAPTION_ERROR(postprocess_label(""), Errc::EmptyLabel);
  EXPECT_CAPTION_ERROR(postprocess_label(" \"\". "), Errc::EmptyLabel);
  EXPECT_CAPTION_ERROR(postprocess_label("BUTTON to play"), Errc::RedundantWord);
  EXPECT_CAPTION_ERROR(postprocess_label("play-button"), Errc::RedundantWord);
  EXPECT_EQ(postprocess_label("Buttons and toggles"), "Buttons and toggles");  // not the standalone word
  EXPECT_EQ(postprocess_label(std::string(60, 'a')), "A" + std::string(59, 'a'));
  EXPECT_CAPTION_ERROR(postprocess_label(std::string(61, 'a')), Errc::TooLong);
  // Length counts code points, not bytes.
  std::string accents;
  for (int i = 0; i < 60; ++i) accents += "é";
  EXPECT_EQ(postprocess_label(accents), accents);
  EXPECT_CAPTION_ERROR(postprocess_label(accents + "é"), Errc::TooLong);
}

TEST(Templates, SectionsAndRendering) {
  const auto sections = parse_sections("## system\nhello\n## element\nclass: {CLASS} {UNKNOWN}\n");
  ASSERT_EQ(sections.size(), 2u);
  EXPECT_NE(sections.at("system").find("hello"), std::string::npos);
  EXPECT_EQ(render_template("class: {CLASS} {UNKNOWN}", {{"CLASS", "ImageButton"}}), "class: ImageButton {UNKNOWN}");
}

TEST(Templates, LoadRequiresEverySection) {
  testing::TempDir dir;
  for (const char* f : {"label_system.txt", "baseline_system.txt", "describe_destination.txt"}) {
    std::filesystem::copy_file(bundled_prompts_dir() / f, dir / f);
  }
  EXPECT_NO_THROW(PromptTemplates::load(dir.path()));
  write_file_atomic(dir / "describe_destination.txt", std::string_view("## system\nonly a system section\n"));
  EXPECT_CAPTION_ERROR(PromptTemplates::load(dir.path()), Errc::SchemaViolation);
  std::filesystem::remove(dir / "describe_destination.txt");
  EXPECT_CAPTION_ERROR(PromptTemplates::load(dir.path()), Errc::MissingFile);
}

TEST(Templates, DescribeInstructionIsVerbatim) {
  const PromptTemplates t = PromptTemplates::load(bundled_prompts_dir());
  EXPECT_NE(t.describe_system.find("Ignore navigational features (e.g., back buttons, tab bars), and use generic "
                                   "description for dynamic contents (e.g., news articles)."),
            std::string::npos);
}

TEST(BuildPrompt, ShapesPerStrategy) {
  Replay r;
  const ButtonSample& s = corpus_sample("player:btn_amp:amplifier");
  const PromptAssets assets = prepare_assets(s, r.generator.config());
  const ScreenDescription desc{s.destination.id, "An amplifier panel."};
  struct Shape {
    Strategy strategy;
    std::size_t images;
    std::size_t texts;
  };
  for (const Shape& shape : {Shape{Strategy::Baseline, 1, 1}, Shape{Strategy::DestShot, 2, 1},
                             Shape{Strategy::DestDesc, 1, 2}, Shape{Strategy::DestDescAndShot, 2, 2}}) {
    const auto d = needs_description(shape.strategy) ? std::optional(desc) : std::nullopt;
    const PromptRequest p = r.generator.build_prompt(s, shape.strategy, d, assets);
    EXPECT_EQ(count_images(p), shape.images) << to_string(shape.strategy);
    EXPECT_EQ(count_texts(p), shape.texts) << to_string(shape.strategy);
    // Origin screenshot first, then the element block.
    ASSERT_TRUE(std::holds_alternative<ImagePart>(p.parts[0]));
    EXPECT_EQ(std::get<ImagePart>(p.parts[0]).png, assets.origin_png);
    const std::string& element = std::get<TextPart>(p.parts[1]).text;
    EXPECT_NE(element.find("speaker"), std::string::npos);
    EXPECT_NE(element.find(to_string(s.element.bounds)), std::string::npos);
    if (shape.images == 2) EXPECT_EQ(std::get<ImagePart>(p.parts.back()).png, assets.destination_png);
    if (shape.texts == 2) {
      EXPECT_NE(std::get<TextPart>(p.parts[2]).text.find("An amplifier panel."), std::string::npos);
    }
    EXPECT_EQ(p.system_text, shape.strategy == Strategy::Baseline ? r.generator.templates().baseline_system
                                                                  : r.generator.templates().label_system);
  }
}

TEST(BuildPrompt, DescriptionPreconditions) {
  Replay r;
  const ButtonSample& s = corpus_sample("player:btn_amp:amplifier");
  const PromptAssets assets = prepare_assets(s, r.generator.config());
  const ScreenDescription desc{s.destination.id, "text"};
  EXPECT_CAPTION_ERROR(r.generator.build_prompt(s, Strategy::DestDesc, std::nullopt, assets), Errc::MissingDescription);
  EXPECT_CAPTION_ERROR(r.generator.build_prompt(s, Strategy::DestDescAndShot, std::nullopt, assets),
                       Errc::MissingDescription);
  EXPECT_CAPTION_ERROR(r.generator.build_prompt(s, Strategy::DestShot, desc, assets), Errc::UnexpectedDescription);
  EXPECT_CAPTION_ERROR(r.generator.build_prompt(s, Strategy::Baseline, desc, assets), Errc::UnexpectedDescription);
}

TEST(PrepareAssets, OriginIsHighlightedDestinationUntouched) {
  const ButtonSample& s = corpus_sample("editor:btn_color:color_picker");
  GenerationConfig config;
  const PromptAssets a = prepare_assets(s, config);
  EXPECT_EQ(decode_png(a.origin_png), highlight_element(decode_png(s.origin.png()), s.element.bounds, config.highlight));
  EXPECT_EQ(a.destination_png, s.destination.png());
  config.highlight_in_prompt = false;
  EXPECT_EQ(decode_png(prepare_assets(s, config).origin_png), decode_png(s.origin.png()));
  config.max_image_dim = 320;
  const PromptAssets small = prepare_assets(s, config);
  EXPECT_EQ(decode_png(small.origin_png).height(), 320);
  EXPECT_EQ(decode_png(small.destination_png).height(), 320);
}

TEST(GenerateLabel, ExampleIconButtons) {
  Replay r;
  EXPECT_EQ(r.generator.generate_label(corpus_sample("editor:btn_color:color_picker"), Strategy::DestDescAndShot).text,
            "Customize theme");
  EXPECT_EQ(r.generator.generate_label(corpus_sample("pairing:btn_manual:code_entry"), Strategy::DestDescAndShot).text,
            "Enter code manually");
  EXPECT_EQ(r.generator.generate_label(corpus_sample("player:btn_amp:amplifier"), Strategy::DestDescAndShot).text,
            "Adjust amplifier");
}

TEST(GenerateLabel, TranscriptRefsReplayToTheLabel) {
  Replay r;
  for (const auto& [id, sample] : corpus_samples()) {
    for (Strategy strategy : kAllStrategies) {
      const LabelCandidate c = r.generator.generate_label(sample, strategy);
      EXPECT_EQ(c.technique, technique_for(strategy));
      ASSERT_EQ(c.transcript_refs.size(), needs_description(strategy) ? 2u : 1u);
      for (const std::string& ref : c.transcript_refs) ASSERT_TRUE(r.store.contains(ref));
      EXPECT_EQ(postprocess_label(r.store.load(c.transcript_refs.back())->response_text), c.text);
    }
  }
}

TEST(GenerateLabel, ReplayIsDeterministic) {
  Replay a;
  Replay b;
  const ButtonSample& s = corpus_sample("home:btn_bell:notifications");
  for (Strategy strategy : kAllStrategies) {
    EXPECT_EQ(a.generator.generate_label(s, strategy), b.generator.generate_label(s, strategy));
  }
}

TEST(GenerateLabel, DescriptionSharedBetweenStrategies) {
  Replay r;
  const ButtonSample& s = corpus_sample("photo:btn_draw:canvas");
  const auto s2 = r.generator.generate_label(s, Strategy::DestDesc);
  const auto s3 = r.generator.generate_label(s, Strategy::DestDescAndShot);
  EXPECT_EQ(s2.transcript_refs.front(), s3.transcript_refs.front());
  EXPECT_NE(s2.transcript_refs.back(), s3.transcript_refs.back());
}

TEST(DescribeDestination, AmplifierFixture) {
  Replay r;
  std::string ref;
  const ScreenDescription d = r.generator.describe_destination(corpus_sample("player:btn_amp:amplifier"), &ref);
  EXPECT_EQ(d.screen_id, "amplifier");
  EXPECT_NE(d.text.find("amplifier"), std::string::npos);
  EXPECT_NE(d.text.find("slider"), std::string::npos);
  EXPECT_EQ(d.text.find("back"), std::string::npos);
  EXPECT_TRUE(r.store.contains(ref));
  const PromptRequest req = r.generator.describe_request(corpus_sample("player:btn_amp:amplifier"),
                                                         prepare_assets(corpus_sample("player:btn_amp:amplifier"), {}));
  EXPECT_EQ(count_images(req), 1u);
  EXPECT_EQ(req.max_output_tokens, 256);
}

TEST(DescribeDestination, EmptyAndLongResponses) {
  const ButtonSample& s = corpus_sample("player:btn_amp:amplifier");
  FixedProvider blank("  \n ");
  LlmClient live(ClientMode::Live, nullptr, &blank);
  LabelGenerator gen(PromptTemplates::load(bundled_prompts_dir()), GenerationConfig{}, live);
  EXPECT_CAPTION_ERROR(gen.describe_destination(s), Errc::EmptyResponse);

  std::string long_text;
  for (int i = 0; i < 700; ++i) long_text += "ü";
  FixedProvider verbose(long_text);
  LlmClient live2(ClientMode::Live, nullptr, &verbose);
  LabelGenerator gen2(PromptTemplates::load(bundled_prompts_dir()), GenerationConfig{}, live2);
  const ScreenDescription d = gen2.describe_destination(s);
  EXPECT_EQ(d.text.size(), 600u * 2);  // 600 two-byte code points
}

TEST(GenerateLabel, PostprocessFailuresPropagate) {
  FixedProvider provider("Menu button");
  LlmClient live(ClientMode::Live, nullptr, &provider);
  LabelGenerator gen(PromptTemplates::load(bundled_prompts_dir()), GenerationConfig{}, live);
  EXPECT_CAPTION_ERROR(gen.generate_label(corpus_sample("home:btn_menu:drawer"), Strategy::Baseline),
                       Errc::RedundantWord);
}

TEST(LabelCandidate, JsonRules) {
  const LabelCandidate c{"ds:a:b:c", Technique::CaptionS3, "Open menu", {"k1", "k2"}};
  EXPECT_EQ(candidate_from_json(to_json(c)), c);
  json human = to_json(LabelCandidate{"ds:a:b:c", Technique::Human, "Menu", {}});
  EXPECT_NO_THROW(candidate_from_json(human));
  human["transcript_refs"] = {"k"};
  EXPECT_CAPTION_ERROR(candidate_from_json(human), Errc::SchemaViolation);
}

}  // namespace
}  // namespace caption
