import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizerFast

TARGET_WORDS = [f"t{i:02d}" for i in range(20)]

VOCAB = (
    ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    + ["she", "he", "her", "him", "his", "herself", "himself",
       "woman", "man", "girl", "boy", "mother", "father",
       "daughter", "son", "female", "male"]
    + ["is", "a", "person", "synonym", "of", "depression", ".",
       "falling", "asleep", "sad", "gloomy", "tired"]
    + TARGET_WORDS
)


@pytest.fixture(scope="session")
def checkpoint_dir(tmp_path_factory):
    """A tiny randomly initialized BERT saved locally (no network)."""
    path = tmp_path_factory.mktemp("tiny-bert")
    tokenizer = BertTokenizerFast(vocab={tok: i for i, tok in enumerate(VOCAB)},
                                  do_lower_case=True)
    torch.manual_seed(1234)
    config = BertConfig(
        vocab_size=len(VOCAB), hidden_size=32, num_hidden_layers=2,
        num_attention_heads=4, intermediate_size=64,
        max_position_embeddings=32,
    )
    model = BertModel(config)
    model.save_pretrained(path)
    tokenizer.save_pretrained(path)
    return path
