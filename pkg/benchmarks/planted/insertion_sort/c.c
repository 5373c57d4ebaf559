/* stable in-place insertion pass */
void sort_by_insertion(int *buf, int len)
{
    int i;
    for (i = 1; i < len; i++) {
        int val = buf[i];
        int j = i;
        for (; j > 0 && buf[j - 1] > val; j--)
            buf[j] = buf[j - 1];
        buf[j] = val;
    }
}
