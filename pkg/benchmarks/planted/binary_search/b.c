int bsearchIndex(int sorted[], int count, int wanted)
{
    int low = 0;
    int high = count;
    while (low < high) {
        int middle = (low + high) / 2;
        if (sorted[middle] < wanted)
            low = middle + 1;
        else
            high = middle;
    }
    if (low < count && sorted[low] == wanted)
        return low;
    return -1;
}
