/* 1 when the word reads the same both ways */
int is_palindrome(char *word)
{
    int left = 0;
    int right = strlen(word) - 1;
    while (left < right) {
        if (word[left] != word[right])
            return 0;
        left++;
        right--;
    }
    return 1;
}
